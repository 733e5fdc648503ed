"""Survey geometry, region partitions, and jittered source-subsampling masks.

Sources and receivers live on the same equally spaced line of fine-grid
indices (colocation convention: source index i and receiver index i are the
same physical location). Only sources are subsampled; receivers stay fully
sampled. A mask is a choice of exactly one source per contiguous region,
which is the jitter constraint of the optimization's state space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRatioError, InvalidArgumentError


@dataclass(frozen=True)
class SurveyGrid:
    """Collinear fine grid of candidate source and receiver positions.

    spacing is in meters and informational only; every algorithm in the
    package works on indices.
    """

    n_s: int
    n_r: int
    spacing: float = 12.5

    def __post_init__(self):
        if self.n_s < 2:
            raise InvalidArgumentError(f"n_s must be >= 2, got {self.n_s}")
        if self.n_r < 1:
            raise InvalidArgumentError(f"n_r must be >= 1, got {self.n_r}")
        if not self.spacing > 0:
            raise InvalidArgumentError(f"spacing must be > 0, got {self.spacing}")


@dataclass(frozen=True)
class RegionPartition:
    """Contiguous near-equal regions of the source axis, one selection each.

    regions are half-open (start, stop) index intervals covering
    0..n_s-1 exactly; sizes differ by at most one, larger regions first.
    """

    grid: SurveyGrid
    regions: tuple[tuple[int, int], ...]
    ratio: float

    @property
    def n_sel(self) -> int:
        return len(self.regions)

    def region_of(self, index: int) -> int:
        """Region number containing a source index."""
        for i, (lo, hi) in enumerate(self.regions):
            if lo <= index < hi:
                return i
        raise InvalidArgumentError(f"index {index} outside 0..{self.grid.n_s - 1}")


@dataclass(frozen=True)
class SourceMask:
    """Binary source selection: one annealing state.

    selected is a sorted tuple of source indices, exactly one per region.
    seed records the generator seed for provenance (-1 when not applicable,
    e.g. for hand-built masks).
    """

    grid: SurveyGrid
    selected: tuple[int, ...]
    partition: RegionPartition
    seed: int = -1


def make_partition(grid: SurveyGrid, ratio: float) -> RegionPartition:
    """Split the source axis into floor(n_s * ratio) near-equal regions.

    Deterministic: no randomness. Larger regions come first when n_s is not
    divisible by the region count.
    """
    if not 0.0 < ratio <= 1.0:
        raise InvalidArgumentError(f"ratio must be in (0, 1], got {ratio}")
    n_sel = int(np.floor(grid.n_s * ratio))
    if n_sel < 1:
        raise DegenerateRatioError(
            f"floor(n_s * ratio) = floor({grid.n_s} * {ratio}) = 0 selects no sources"
        )
    base, rem = divmod(grid.n_s, n_sel)
    regions = []
    start = 0
    for i in range(n_sel):
        size = base + 1 if i < rem else base
        regions.append((start, start + size))
        start += size
    return RegionPartition(grid=grid, regions=tuple(regions), ratio=ratio)


def jittered_mask(partition: RegionPartition, seed: int) -> SourceMask:
    """Draw one source uniformly at random within each region.

    Adjacent selections across region boundaries are allowed, so the gap
    between consecutive selections is bounded by 2 * (max region size) - 1.
    Deterministic under a fixed seed: one draw per region, in region order.
    """
    rng = np.random.default_rng(seed)
    selected = tuple(int(rng.integers(lo, hi)) for lo, hi in partition.regions)
    return SourceMask(grid=partition.grid, selected=selected, partition=partition, seed=seed)


def check_constraints(mask: SourceMask) -> bool:
    """True iff the cardinality and one-selection-per-region constraints hold."""
    part = mask.partition
    if len(mask.selected) != part.n_sel:
        return False
    n_s = mask.grid.n_s
    if any(not 0 <= s < n_s for s in mask.selected):
        return False
    if len(set(mask.selected)) != len(mask.selected):
        return False
    hits = [0] * part.n_sel
    for s in mask.selected:
        placed = False
        for i, (lo, hi) in enumerate(part.regions):
            if lo <= s < hi:
                hits[i] += 1
                placed = True
                break
        if not placed:
            return False
    return all(h == 1 for h in hits)


# ---------------------------------------------------------------------------
# Serialization

def mask_to_dict(mask: SourceMask) -> dict:
    return {
        "n_s": mask.grid.n_s,
        "n_r": mask.grid.n_r,
        "spacing_m": float(mask.grid.spacing),
        "ratio": float(mask.partition.ratio),
        "selected_sources": sorted(int(s) for s in mask.selected),
        "seed": int(mask.seed),
    }


def mask_from_dict(data: dict) -> SourceMask:
    try:
        grid = SurveyGrid(n_s=int(data["n_s"]), n_r=int(data["n_r"]),
                          spacing=float(data["spacing_m"]))
        partition = make_partition(grid, float(data["ratio"]))
        selected = tuple(sorted(int(s) for s in data["selected_sources"]))
        seed = int(data["seed"])
    except KeyError as exc:
        raise InvalidArgumentError(f"mask file missing key {exc}") from exc
    mask = SourceMask(grid=grid, selected=selected, partition=partition, seed=seed)
    if not check_constraints(mask):
        raise InvalidArgumentError("mask file violates cardinality or jitter constraints")
    return mask


def save_mask_json(mask: SourceMask, path) -> None:
    with open(path, "w") as fh:
        json.dump(mask_to_dict(mask), fh, indent=2)
        fh.write("\n")


def load_mask_json(path) -> SourceMask:
    with open(path) as fh:
        return mask_from_dict(json.load(fh))


def save_mask_text(mask: SourceMask, path) -> None:
    """Plain-text variant: header '# n_s n_r ratio', one index per line."""
    with open(path, "w") as fh:
        fh.write(f"# {mask.grid.n_s} {mask.grid.n_r} {mask.partition.ratio!r}\n")
        for s in sorted(mask.selected):
            fh.write(f"{s}\n")


def load_mask_text(path, spacing: float = 12.5) -> SourceMask:
    """Read the plain-text variant. spacing is not stored in this format."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise InvalidArgumentError("text mask file must start with '# n_s n_r ratio'")
        parts = header[1:].split()
        if len(parts) != 3:
            raise InvalidArgumentError(f"malformed text mask header: {header!r}")
        n_s, n_r, ratio = int(parts[0]), int(parts[1]), float(parts[2])
        selected = tuple(sorted(int(line) for line in fh if line.strip()))
    grid = SurveyGrid(n_s=n_s, n_r=n_r, spacing=spacing)
    partition = make_partition(grid, ratio)
    mask = SourceMask(grid=grid, selected=selected, partition=partition, seed=-1)
    if not check_constraints(mask):
        raise InvalidArgumentError("text mask file violates constraints")
    return mask
