"""Source-receiver to midpoint-offset mapping of binary masks.

A trace (i_s, i_r) lands at midpoint index m = i_s + i_r and offset index
h = i_s - i_r + (n_r - 1), both in 0..n_s+n_r-2, so the image is a square
matrix of side n_s + n_r - 1. The map is injective, which keeps every trace
in its own cell. With seismic reciprocity the swapped trace (i_r, i_s) is
treated as recorded too whenever both swapped indices stay on the grid;
coincident cells (zero offset) merge, since the mask is binary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .survey import SourceMask


@dataclass(frozen=True)
class MOMatrix:
    """Sparse binary matrix in the midpoint-offset domain.

    Stored as a coordinate list: (rows[k], cols[k]) is a nonzero cell.
    Coordinates are unique and sorted lexicographically.
    """

    side: int
    rows: np.ndarray
    cols: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.rows.size)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.side, self.side))
        dense[self.rows, self.cols] = 1.0
        return dense


def trace_to_mo(i_s, i_r, n_r):
    """Index map (i_s, i_r) -> (m, h). Accepts scalars or arrays."""
    return i_s + i_r, i_s - i_r + (n_r - 1)


def mo_to_trace(m, h, n_r):
    """Inverse map on the diamond: (m, h) -> (i_s, i_r)."""
    h0 = h - (n_r - 1)
    return (m + h0) // 2, (m - h0) // 2


def trace_pairs(mask: SourceMask, reciprocity: bool):
    """All recorded (i_s, i_r) pairs for a mask, as two int arrays.

    With reciprocity on, the swapped pair (i_r, i_s) is appended whenever
    i_r <= n_s-1 and i_s <= n_r-1, i.e. both swapped indices are valid on
    the grid. Pairs are not deduplicated here.
    """
    n_s, n_r = mask.grid.n_s, mask.grid.n_r
    sel = np.asarray(mask.selected, dtype=np.int64)
    rcv = np.arange(n_r, dtype=np.int64)
    i_s = np.repeat(sel, n_r)
    i_r = np.tile(rcv, sel.size)
    if not reciprocity:
        return i_s, i_r
    # swapped source index is i_r, valid when i_r <= n_s-1;
    # swapped receiver index is i_s, valid when i_s <= n_r-1
    ok = (i_r <= n_s - 1) & (i_s <= n_r - 1)
    return np.concatenate([i_s, i_r[ok]]), np.concatenate([i_r, i_s[ok]])


def to_mo(mask: SourceMask, reciprocity: bool) -> MOMatrix:
    """Map a source mask to its binary midpoint-offset matrix."""
    n_s, n_r = mask.grid.n_s, mask.grid.n_r
    side = n_s + n_r - 1
    i_s, i_r = trace_pairs(mask, reciprocity)
    m, h = trace_to_mo(i_s, i_r, n_r)
    flat = np.unique(m * side + h)
    return MOMatrix(side=side, rows=flat // side, cols=flat % side)


def mo_nonzeros(mo: MOMatrix) -> int:
    """Number of 1-entries."""
    return mo.nnz


def dump_coords(mo: MOMatrix, path) -> None:
    """Debug dump: one 'm h 1' line per nonzero, for external plotting."""
    with open(path, "w") as fh:
        for m, h in zip(mo.rows, mo.cols):
            fh.write(f"{m} {h} 1\n")
