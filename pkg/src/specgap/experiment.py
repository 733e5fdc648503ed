"""Multi-trial experiment harness: jitter, optimize, reconstruct, score.

Every trial is reproducible from base_seed alone: stage s of trial i draws
its integer seed from SeedSequence([base_seed, i, s]), so trials are
independent of each other and of how many trials run. The completion seed
is shared by the jittered and optimized reconstructions of a trial, which
keeps the comparison paired.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .anneal import AnnealConfig, optimize, write_trajectory_csv
from .completion import CompletionConfig, complete, snr, subsample
from .errors import InvalidArgumentError
from .survey import SurveyGrid, jittered_mask, make_partition, save_mask_json
from .synth import lowrank_mo_slice

STAGE_JITTER = 0
STAGE_ANNEAL = 1
STAGE_SYNTH = 2
STAGE_COMPLETE = 3

CSV_HEADER = ["trial", "seed", "sr_jittered", "sr_optimized",
              "sr_reduction_pct", "snr_jittered_db", "snr_optimized_db"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on. JSON key 'lambda' maps to
    the attribute 'lam' (Python keyword)."""

    n_s: int
    n_r: int
    ratio: float
    max_iters: int
    rank: int
    n_trials: int
    base_seed: int
    output_dir: str
    spacing: float = 12.5
    t0: float | None = None
    alpha: float | None = None
    move_fraction: float = 0.2
    reciprocity: bool = True
    iters: int = 200
    lam: float | None = None

    def __post_init__(self):
        if self.n_trials < 1:
            raise InvalidArgumentError(f"n_trials must be >= 1, got {self.n_trials}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidArgumentError(f"bad experiment config: {exc}") from exc

    def to_dict(self) -> dict:
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        return data


def stage_seed(base_seed: int, trial: int, stage: int) -> int:
    """Deterministic per-trial, per-stage seed derivation."""
    return int(np.random.SeedSequence([base_seed, trial, stage]).generate_state(1)[0])


def _fmt(x: float) -> str:
    return repr(float(x))


def run_trial(config: ExperimentConfig, trial: int, out_dir: Path,
              validate_states: bool = False) -> dict:
    grid = SurveyGrid(n_s=config.n_s, n_r=config.n_r, spacing=config.spacing)
    partition = make_partition(grid, config.ratio)

    jitter_seed = stage_seed(config.base_seed, trial, STAGE_JITTER)
    initial = jittered_mask(partition, jitter_seed)
    save_mask_json(initial, out_dir / f"mask_jittered_{trial}.json")

    anneal_config = AnnealConfig(
        max_iters=config.max_iters,
        seed=stage_seed(config.base_seed, trial, STAGE_ANNEAL),
        t0=config.t0,
        alpha=config.alpha,
        move_fraction=config.move_fraction,
        reciprocity=config.reciprocity,
    )
    result = optimize(initial, anneal_config, validate_states=validate_states)
    save_mask_json(result.best_mask, out_dir / f"mask_optimized_{trial}.json")
    write_trajectory_csv(result, out_dir / f"trajectory_{trial}.csv")

    truth = lowrank_mo_slice(grid, config.rank,
                             stage_seed(config.base_seed, trial, STAGE_SYNTH))
    completion_config = CompletionConfig(
        rank=config.rank, iters=config.iters, lam=config.lam,
        seed=stage_seed(config.base_seed, trial, STAGE_COMPLETE),
    )
    snr_jittered = snr(truth, complete(subsample(truth, initial), initial,
                                       completion_config, config.reciprocity))
    snr_optimized = snr(truth, complete(subsample(truth, result.best_mask),
                                        result.best_mask, completion_config,
                                        config.reciprocity))

    sr_jittered = result.initial_sr
    sr_optimized = result.best_sr
    reduction = 100.0 * (sr_jittered - sr_optimized) / sr_jittered
    return {
        "trial": trial,
        "seed": jitter_seed,
        "sr_jittered": sr_jittered,
        "sr_optimized": sr_optimized,
        "sr_reduction_pct": reduction,
        "snr_jittered_db": snr_jittered,
        "snr_optimized_db": snr_optimized,
    }


def run_experiment(config: ExperimentConfig, validate_states: bool = False,
                   log=None) -> dict:
    """Run all trials, write experiment.csv and summary.json, return summary.

    A failing trial is recorded as a row of NaNs and does not stop the
    remaining trials.
    """
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    errors = []
    for trial in range(config.n_trials):
        try:
            row = run_trial(config, trial, out_dir, validate_states=validate_states)
        except Exception as exc:  # recorded, trial aborted
            errors.append((trial, exc))
            row = {
                "trial": trial,
                "seed": stage_seed(config.base_seed, trial, STAGE_JITTER),
                "sr_jittered": math.nan,
                "sr_optimized": math.nan,
                "sr_reduction_pct": math.nan,
                "snr_jittered_db": math.nan,
                "snr_optimized_db": math.nan,
            }
            if log is not None:
                print(f"trial {trial} failed: {exc}", file=log)
        rows.append(row)
        if log is not None and not math.isnan(row["sr_jittered"]):
            print(
                f"trial {trial}: SR {row['sr_jittered']:.4f} -> "
                f"{row['sr_optimized']:.4f} ({row['sr_reduction_pct']:.1f}%), "
                f"SNR {row['snr_jittered_db']:.2f} -> {row['snr_optimized_db']:.2f} dB",
                file=log,
            )

    with open(out_dir / "experiment.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([row["trial"], row["seed"],
                             _fmt(row["sr_jittered"]), _fmt(row["sr_optimized"]),
                             _fmt(row["sr_reduction_pct"]),
                             _fmt(row["snr_jittered_db"]),
                             _fmt(row["snr_optimized_db"])])

    ok = [r for r in rows if not math.isnan(r["sr_jittered"])]

    def mean_of(key):
        return float(np.mean([r[key] for r in ok])) if ok else None

    summary = {
        "n_trials": config.n_trials,
        "n_failed": len(errors),
        "mean_sr_jittered": mean_of("sr_jittered"),
        "mean_sr_optimized": mean_of("sr_optimized"),
        "mean_sr_reduction_pct": mean_of("sr_reduction_pct"),
        "mean_snr_jittered_db": mean_of("snr_jittered_db"),
        "mean_snr_optimized_db": mean_of("snr_optimized_db"),
        "mean_snr_gain_db": (
            float(np.mean([r["snr_optimized_db"] - r["snr_jittered_db"] for r in ok]))
            if ok else None
        ),
        "trials": [
            {k: (None if isinstance(v, float) and math.isnan(v) else v)
             for k, v in row.items()}
            for row in rows
        ],
        "config": config.to_dict(),
    }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    if errors and len(errors) == config.n_trials:
        first = errors[0][1]
        raise RuntimeError(f"all {config.n_trials} trials failed; first error: {first}")
    return summary
