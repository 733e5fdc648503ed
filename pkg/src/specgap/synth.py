"""Synthetic frequency-slice generators with controllable low-rank structure.

Two flavors: physically flavored planar events (rank-1 terms in the
source-receiver domain), and slices sampled from a seeded random rank-k
factorization laid out in the midpoint-offset domain, which is the cleanest
way to exercise the completion oracle's low-rank premise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .completion import FrequencySlice
from .errors import InvalidArgumentError
from .modomain import trace_to_mo
from .survey import SurveyGrid

_FACTOR_STREAM = 4


@dataclass(frozen=True)
class EventSpec:
    """Planar event t(s, r) = intercept + p * x_s + q * x_r.

    amplitude is complex; slownesses are in seconds per meter. An event is
    reciprocity-consistent only when p == q.
    """

    amplitude: complex
    intercept_time: float
    source_slowness: float
    receiver_slowness: float


def planar_events_slice(grid: SurveyGrid, events, omega: float) -> FrequencySlice:
    """Sum of planar events, each a rank-1 outer product over (source, receiver).

    D[s, r] = sum_j A_j exp(-i omega (tau_j + p_j x_s + q_j x_r)) with
    x = index * spacing, so the slice has rank at most len(events).
    """
    events = list(events)
    if not events:
        raise InvalidArgumentError("need at least one event")
    x_s = np.arange(grid.n_s) * grid.spacing
    x_r = np.arange(grid.n_r) * grid.spacing
    values = np.zeros((grid.n_s, grid.n_r), dtype=np.complex128)
    for ev in events:
        along_s = np.exp(-1j * omega * ev.source_slowness * x_s)
        along_r = np.exp(-1j * omega * (ev.intercept_time + ev.receiver_slowness * x_r))
        values += ev.amplitude * np.outer(along_s, along_r)
    return FrequencySlice(values=values, omega=omega)


def lowrank_mo_factors(grid: SurveyGrid, rank: int, seed: int):
    """Seeded random rank factors (L, R) over the MO-domain index square.

    R is mirror-symmetric about the zero-offset column h = n_r - 1
    (columns h and 2(n_r-1) - h share one draw), which makes the resulting
    data invariant under source-receiver swap, so reciprocity-augmented
    observations stay consistent with the truth.
    """
    if rank < 1:
        raise InvalidArgumentError(f"rank must be >= 1, got {rank}")
    side = grid.n_s + grid.n_r - 1
    if rank > side:
        raise InvalidArgumentError(f"rank {rank} too large for MO side {side}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, _FACTOR_STREAM]))
    L = rng.standard_normal((side, rank)) + 1j * rng.standard_normal((side, rank))
    R = np.zeros((side, rank), dtype=np.complex128)
    center = grid.n_r - 1
    for h in range(side):
        mirror = 2 * center - h
        if 0 <= mirror < h:
            R[h] = R[mirror]
        else:
            R[h] = rng.standard_normal(rank) + 1j * rng.standard_normal(rank)
    return L, R


def lowrank_mo_slice(grid: SurveyGrid, rank: int, seed: int) -> FrequencySlice:
    """Slice whose MO-domain data is drawn from a rank-`rank` factorization.

    The slice value at trace (i_s, i_r) is the (m, h) entry of L @ R^H, so
    the diamond data is exactly consistent with a rank-`rank` completion.
    Deterministic under seed.
    """
    L, R = lowrank_mo_factors(grid, rank, seed)
    full = L @ R.conj().T
    all_s = np.repeat(np.arange(grid.n_s), grid.n_r)
    all_r = np.tile(np.arange(grid.n_r), grid.n_s)
    m, h = trace_to_mo(all_s, all_r, grid.n_r)
    values = full[m, h].reshape(grid.n_s, grid.n_r)
    return FrequencySlice(values=values, omega=0.0)
