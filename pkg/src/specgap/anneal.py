"""Simulated annealing over jitter-constrained source masks.

Geometric cooling T(k) = T0 * alpha^k, an exp(-delta/T) acceptance rule
(downhill and zero-delta moves always accepted), and a proposal that moves
a fixed fraction of the selected sources uniformly within their own
regions. The chain is fully reproducible from (initial mask, config.seed).

T0 and alpha default to an auto-calibration: T0 is set so the median
|delta| of 50 warm-up proposals from the initial state is accepted with
probability 0.8, and alpha is set so the final temperature is 1e-4 * T0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .spectral import spectral_ratio
from .survey import SourceMask, check_constraints

WARMUP_PROPOSALS = 50
WARMUP_ACCEPT_PROB = 0.8
FINAL_TEMP_FACTOR = 1e-4

# Stream tags mixed with config.seed so calibration draws never perturb
# the chain's own stream.
_CALIB_STREAM = 1
_CHAIN_STREAM = 2


@dataclass(frozen=True)
class AnnealConfig:
    """Schedule and proposal parameters for one annealing chain.

    t0 / alpha left as None are auto-calibrated at the start of optimize().
    """

    max_iters: int
    seed: int
    t0: float | None = None
    alpha: float | None = None
    move_fraction: float = 0.2
    reciprocity: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidArgumentError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.t0 is not None and not self.t0 > 0:
            raise InvalidArgumentError(f"t0 must be > 0, got {self.t0}")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.move_fraction <= 1.0:
            raise InvalidArgumentError(
                f"move_fraction must be in (0, 1], got {self.move_fraction}"
            )


@dataclass(frozen=True)
class TrajectoryPoint:
    """State of the chain after processing one iteration."""

    iteration: int
    sr_current: float
    temperature: float
    accepted: bool


@dataclass(frozen=True)
class AnnealResult:
    """Output of one chain: the paper-faithful final state plus the best
    state visited, which dominates it at zero extra cost."""

    final_mask: SourceMask
    best_mask: SourceMask
    trajectory: tuple[TrajectoryPoint, ...]
    initial_sr: float
    final_sr: float
    best_sr: float
    evaluations: int
    t0: float
    alpha: float


def temperature(k: int, config: AnnealConfig) -> float:
    """T(k) = T0 * alpha^k for an explicit (already resolved) schedule."""
    if config.t0 is None or config.alpha is None:
        raise InvalidArgumentError("temperature() needs explicit t0 and alpha")
    if not 0 <= k < config.max_iters:
        raise InvalidArgumentError(f"iteration {k} outside 0..{config.max_iters - 1}")
    return config.t0 * config.alpha**k


def propose_neighbor(state: SourceMask, rng: np.random.Generator,
                     move_fraction: float = 0.2) -> SourceMask:
    """Move ceil(move_fraction * n_sel) selected sources within their regions.

    The sources to move are drawn uniformly without replacement; each lands
    uniformly anywhere in its own region, including its current slot, so a
    proposal can be a partial (or for singleton regions, total) no-op. The
    input state is never modified.
    """
    part = state.partition
    n_move = math.ceil(move_fraction * part.n_sel)
    moved = rng.choice(part.n_sel, size=n_move, replace=False)
    selected = list(state.selected)
    for region_idx in sorted(int(i) for i in moved):
        lo, hi = part.regions[region_idx]
        selected[region_idx] = int(rng.integers(lo, hi))
    return SourceMask(grid=state.grid, selected=tuple(selected),
                      partition=part, seed=state.seed)


def accept(delta_l: float, t: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: always accept delta <= 0, else with exp(-delta/t)."""
    if delta_l <= 0.0:
        return True
    ratio = delta_l / t
    p = math.exp(-ratio) if ratio < 700.0 else 0.0
    return bool(rng.random() < p)


def resolve_schedule(initial: SourceMask, config: AnnealConfig,
                     initial_sr: float | None = None):
    """Fill in auto-calibrated t0 / alpha.

    Returns (t0, alpha, extra_evaluations). Warm-up proposals come from a
    stream separate from the chain's, so calibration never changes the
    trajectory of an otherwise identical explicit-schedule run.
    """
    evals = 0
    t0 = config.t0
    if t0 is None:
        if initial_sr is None:
            initial_sr = spectral_ratio(initial, config.reciprocity)
            evals += 1
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, _CALIB_STREAM]))
        deltas = []
        for _ in range(WARMUP_PROPOSALS):
            cand = propose_neighbor(initial, rng, config.move_fraction)
            deltas.append(abs(spectral_ratio(cand, config.reciprocity) - initial_sr))
            evals += 1
        med = float(np.median(deltas))
        if med > 0.0:
            t0 = med / math.log(1.0 / WARMUP_ACCEPT_PROB)
        else:
            # all proposals were no-ops (e.g. singleton regions); any tiny
            # positive temperature gives the same hill-descent behavior
            t0 = 1e-12
    alpha = config.alpha
    if alpha is None:
        if config.max_iters > 1:
            alpha = FINAL_TEMP_FACTOR ** (1.0 / (config.max_iters - 1))
        else:
            alpha = 0.5  # never used beyond k = 0
    return t0, alpha, evals


def optimize(initial: SourceMask, config: AnnealConfig,
             validate_states: bool = False) -> AnnealResult:
    """Run the annealing loop for config.max_iters iterations.

    One spectral evaluation per iteration; the current state's objective is
    cached. With validate_states=True every visited state is checked
    against the cardinality and one-per-region constraints and a violation
    raises RuntimeError (used by the acceptance suite).
    """
    if not check_constraints(initial):
        raise InvalidArgumentError("initial mask violates constraints")

    sr_cur = spectral_ratio(initial, config.reciprocity)
    evaluations = 1
    t0, alpha, extra = resolve_schedule(initial, config, initial_sr=sr_cur)
    evaluations += extra

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, _CHAIN_STREAM]))
    current = initial
    initial_sr = sr_cur
    best, best_sr = current, sr_cur
    trajectory = []
    for k in range(config.max_iters):
        t = t0 * alpha**k
        cand = propose_neighbor(current, rng, config.move_fraction)
        if validate_states and not check_constraints(cand):
            raise RuntimeError(f"proposal at iteration {k} violates constraints")
        sr_cand = spectral_ratio(cand, config.reciprocity)
        evaluations += 1
        accepted = accept(sr_cand - sr_cur, t, rng)
        if accepted:
            current, sr_cur = cand, sr_cand
            if sr_cur < best_sr:
                best, best_sr = current, sr_cur
        if validate_states and not check_constraints(current):
            raise RuntimeError(f"state at iteration {k} violates constraints")
        trajectory.append(TrajectoryPoint(iteration=k, sr_current=sr_cur,
                                          temperature=t, accepted=accepted))
    return AnnealResult(
        final_mask=current,
        best_mask=best,
        trajectory=tuple(trajectory),
        initial_sr=initial_sr,
        final_sr=sr_cur,
        best_sr=best_sr,
        evaluations=evaluations,
        t0=t0,
        alpha=alpha,
    )


def write_trajectory_csv(result: AnnealResult, path) -> None:
    """Convergence log: iter,temperature,sr_current,sr_best,accepted."""
    best = result.initial_sr
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "temperature", "sr_current", "sr_best", "accepted"])
        for point in result.trajectory:
            best = min(best, point.sr_current)
            writer.writerow([point.iteration, repr(point.temperature),
                             repr(point.sr_current), repr(best),
                             int(point.accepted)])
