"""Rank-constrained matrix completion oracle and reconstruction scoring.

Observed traces are mapped to the midpoint-offset domain, a rank-k
factorization L @ R^H is fit to the observed cells by alternating
regularized least squares, and the completed diamond is mapped back to the
full source-receiver matrix. Cells never covered by any trace (outside the
diamond) take part in neither the objective nor the SNR; the SNR is always
computed in the source-receiver domain over all n_s x n_r entries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalError
from .modomain import trace_pairs, trace_to_mo
from .survey import SourceMask

_INIT_STREAM = 3
SNR_CAP_DB = 300.0


@dataclass(frozen=True)
class FrequencySlice:
    """Complex monochromatic data matrix over (source, receiver).

    omega is an angular-frequency tag carried along for bookkeeping.
    """

    values: np.ndarray
    omega: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 2:
            raise InvalidArgumentError(f"slice must be 2-D, got ndim={values.ndim}")
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("slice contains non-finite entries")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CompletionConfig:
    """Alternating-minimization settings.

    lam=None scales the ridge term to 1e-6 times the largest singular
    value of the observed MO matrix.
    """

    rank: int
    iters: int = 200
    lam: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise InvalidArgumentError(f"rank must be >= 1, got {self.rank}")
        if self.iters < 1:
            raise InvalidArgumentError(f"iters must be >= 1, got {self.iters}")
        if self.lam is not None and self.lam < 0:
            raise InvalidArgumentError(f"lambda must be >= 0, got {self.lam}")


def subsample(slc: FrequencySlice, mask: SourceMask) -> FrequencySlice:
    """Zero out the rows (sources) that the mask does not select."""
    n_s, n_r = mask.grid.n_s, mask.grid.n_r
    if slc.values.shape != (n_s, n_r):
        raise InvalidArgumentError(
            f"slice shape {slc.values.shape} does not match grid ({n_s}, {n_r})"
        )
    observed = np.zeros_like(slc.values)
    sel = list(mask.selected)
    observed[sel, :] = slc.values[sel, :]
    return FrequencySlice(values=observed, omega=slc.omega)


def observed_mo_cells(slc: FrequencySlice, mask: SourceMask, reciprocity: bool):
    """Observed MO cells (ms, hs) and their data values, deduplicated.

    Each recorded trace contributes its cell; with reciprocity the swapped
    trace contributes the mirrored-offset cell with the same recorded
    value. When a cell is covered twice the directly recorded trace wins.
    """
    i_s, i_r = trace_pairs(mask, reciprocity)
    ms, hs = trace_to_mo(i_s, i_r, mask.grid.n_r)
    side = mask.grid.n_s + mask.grid.n_r - 1
    flat = ms * side + hs
    # np.unique keeps the first occurrence index per flat cell; direct
    # traces precede reciprocal ones in trace_pairs output
    _, first = np.unique(flat, return_index=True)
    first.sort()
    values = slc.values[i_s[first], i_r[first]]
    return ms[first], hs[first], values


def als_complete(ms, hs, values, side, config: CompletionConfig):
    """Fit L @ R^H to values at cells (ms, hs) of a side x side matrix.

    Alternates exact ridge-regularized least-squares updates of L and R
    from a seeded random start. Returns (L, R, objective_history) with one
    objective value per sweep; each half-sweep solves its subproblem
    exactly, so the history is non-increasing.
    """
    k = config.rank
    if k > side:
        raise InvalidArgumentError(f"rank {k} exceeds MO matrix side {side}")
    lam = config.lam
    if lam is None:
        dense = np.zeros((side, side), dtype=np.complex128)
        dense[ms, hs] = values
        lam = 1e-6 * float(np.linalg.norm(dense, 2))
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, _INIT_STREAM]))
    scale = 1.0 / math.sqrt(k)
    L = scale * (rng.standard_normal((side, k)) + 1j * rng.standard_normal((side, k)))
    R = scale * (rng.standard_normal((side, k)) + 1j * rng.standard_normal((side, k)))

    eye = np.eye(k)
    conj_values = np.conj(values)

    def solve_factor(fixed, group_idx, target):
        # Batched ridge solve: per group index i, returns
        #   argmin_x  sum_{cells n of i} |conj(fixed[n]) . x - target[n]|^2
        #             + lam |x|^2
        # via normal equations accumulated cell-by-cell.
        gram = np.zeros((side, k, k), dtype=np.complex128)
        rhs = np.zeros((side, k), dtype=np.complex128)
        outer = np.einsum("nc,nd->ncd", fixed, np.conj(fixed))
        np.add.at(gram, group_idx, outer)
        np.add.at(rhs, group_idx, fixed * target[:, None])
        gram += lam * eye
        try:
            return np.linalg.solve(gram, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                "singular normal equations in alternating least squares; "
                "use lambda > 0"
            ) from exc

    history = []
    for _ in range(config.iters):
        # E[m,h] = sum_c L[m,c] conj(R[h,c]). Row m residuals use design
        # rows conj(R[h]); column h residuals, after conjugating, use
        # design rows conj(L[m]) with target conj(values).
        L = solve_factor(R[hs], ms, values)
        R = solve_factor(L[ms], hs, conj_values)
        fit = np.einsum("nc,nc->n", L[ms], np.conj(R[hs]))
        obj = float(np.sum(np.abs(fit - values) ** 2)
                    + lam * (np.linalg.norm(L) ** 2 + np.linalg.norm(R) ** 2))
        history.append(obj)
    return L, R, history


def complete(observed: FrequencySlice, mask: SourceMask, config: CompletionConfig,
             reciprocity: bool) -> FrequencySlice:
    """Complete an observed slice and map it back to source-receiver.

    Deterministic given config.seed.
    """
    n_s, n_r = mask.grid.n_s, mask.grid.n_r
    if observed.values.shape != (n_s, n_r):
        raise InvalidArgumentError(
            f"slice shape {observed.values.shape} does not match grid ({n_s}, {n_r})"
        )
    side = n_s + n_r - 1
    ms, hs, values = observed_mo_cells(observed, mask, reciprocity)
    L, R, _ = als_complete(ms, hs, values, side, config)
    full = L @ R.conj().T
    all_s = np.repeat(np.arange(n_s), n_r)
    all_r = np.tile(np.arange(n_r), n_s)
    m_all, h_all = trace_to_mo(all_s, all_r, n_r)
    restored = full[m_all, h_all].reshape(n_s, n_r)
    return FrequencySlice(values=restored, omega=observed.omega)


def snr(truth: FrequencySlice, estimate: FrequencySlice) -> float:
    """Reconstruction quality in dB: -20 log10(||t - e||_F / ||t||_F).

    A perfect reconstruction is capped at 300 dB rather than +inf.
    """
    t = truth.values
    e = estimate.values
    if t.shape != e.shape:
        raise InvalidArgumentError(f"shape mismatch {t.shape} vs {e.shape}")
    t_norm = float(np.linalg.norm(t))
    if t_norm == 0.0:
        raise InvalidArgumentError("truth slice is identically zero")
    rel = float(np.linalg.norm(t - e)) / t_norm
    if rel == 0.0:
        return SNR_CAP_DB
    return min(-20.0 * math.log10(rel), SNR_CAP_DB)


# ---------------------------------------------------------------------------
# Slice files: flat little-endian complex64, row-major, with a JSON sidecar.

def sidecar_path(path) -> str:
    return f"{path}.json"


def save_slice(slc: FrequencySlice, path) -> None:
    slc.values.astype("<c8").tofile(path)
    n_s, n_r = slc.values.shape
    with open(sidecar_path(path), "w") as fh:
        json.dump({"n_s": int(n_s), "n_r": int(n_r), "omega": float(slc.omega)}, fh)
        fh.write("\n")


def load_slice(path) -> FrequencySlice:
    with open(sidecar_path(path)) as fh:
        meta = json.load(fh)
    raw = np.fromfile(path, dtype="<c8")
    n_s, n_r = int(meta["n_s"]), int(meta["n_r"])
    if raw.size != n_s * n_r:
        raise InvalidArgumentError(
            f"slice file holds {raw.size} values, sidecar says {n_s}x{n_r}"
        )
    return FrequencySlice(values=raw.reshape(n_s, n_r).astype(np.complex128),
                          omega=float(meta["omega"]))
