"""Command-line interface.

Subcommands: generate, evaluate, optimize, reconstruct, experiment.
Exit codes: 0 success, 2 invalid arguments, 3 numerical failure,
4 I/O failure. Every command is a pure function of its flags and seeds;
output files are byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import sys

from .anneal import AnnealConfig, optimize, write_trajectory_csv
from .completion import (CompletionConfig, complete, load_slice, save_slice,
                         snr, subsample)
from .errors import ConvergenceError, NumericalError
from .experiment import ExperimentConfig, run_experiment
from .spectral import top2_singular
from .modomain import to_mo
from .survey import (SurveyGrid, jittered_mask, load_mask_json, make_partition,
                     save_mask_json, save_mask_text)
from .synth import lowrank_mo_slice


def _print_json(payload: dict) -> None:
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")


def _cmd_generate(args) -> int:
    grid = SurveyGrid(n_s=args.n_s, n_r=args.n_r, spacing=args.spacing)
    mask = jittered_mask(make_partition(grid, args.ratio), args.seed)
    if args.text:
        save_mask_text(mask, args.out)
    else:
        save_mask_json(mask, args.out)
    return 0


def _cmd_evaluate(args) -> int:
    mask = load_mask_json(args.mask)
    result = top2_singular(to_mo(mask, args.reciprocity))
    _print_json({
        "sr": result.sr,
        "sigma1": result.sigma1,
        "sigma2": result.sigma2,
        "iterations": result.iterations_used,
        "reciprocity": args.reciprocity,
    })
    return 0


def _cmd_optimize(args) -> int:
    mask = load_mask_json(args.mask)
    config = AnnealConfig(
        max_iters=args.max_iters,
        seed=args.seed,
        t0=args.t0,
        alpha=args.alpha,
        move_fraction=args.move_fraction,
        reciprocity=args.reciprocity,
    )
    result = optimize(mask, config)
    save_mask_json(result.best_mask, args.out)
    if args.trajectory:
        write_trajectory_csv(result, args.trajectory)
    _print_json({
        "initial_sr": result.initial_sr,
        "final_sr": result.final_sr,
        "best_sr": result.best_sr,
        "sr_reduction_pct": 100.0 * (result.initial_sr - result.best_sr)
                            / result.initial_sr,
        "evaluations": result.evaluations,
        "t0": result.t0,
        "alpha": result.alpha,
        "out": str(args.out),
    })
    return 0


def _cmd_reconstruct(args) -> int:
    mask = load_mask_json(args.mask)
    if args.truth:
        truth = load_slice(args.truth)
    else:
        truth = lowrank_mo_slice(mask.grid, args.synth_rank, args.synth_seed)
    config = CompletionConfig(rank=args.rank, iters=args.iters, lam=args.lam,
                              seed=args.seed)
    observed = subsample(truth, mask)
    estimate = complete(observed, mask, config, args.reciprocity)
    if args.out:
        save_slice(estimate, args.out)
    _print_json({
        "snr_db": snr(truth, estimate),
        "rank": args.rank,
        "iters": args.iters,
        "reciprocity": args.reciprocity,
    })
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    if args.output_dir is not None:
        data["output_dir"] = args.output_dir
    config = ExperimentConfig.from_dict(data)
    summary = run_experiment(config, log=sys.stderr if args.verbose else None)
    _print_json(summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specgap",
        description="Spectral-gap optimization of seismic source-subsampling masks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a jittered source mask")
    p.add_argument("--n-s", type=int, required=True)
    p.add_argument("--n-r", type=int, required=True)
    p.add_argument("--spacing", type=float, default=12.5)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--text", action="store_true",
                   help="write the plain-text variant instead of JSON")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("evaluate", help="print the spectral ratio of a mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--reciprocity", action=argparse.BooleanOptionalAction,
                   default=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("optimize", help="anneal a mask toward a smaller SR")
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trajectory", default=None,
                   help="also write the per-iteration CSV log here")
    p.add_argument("--max-iters", type=int, default=4000)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--move-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reciprocity", action=argparse.BooleanOptionalAction,
                   default=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("reconstruct",
                       help="subsample a slice with a mask, complete it, report SNR")
    p.add_argument("--mask", required=True)
    p.add_argument("--truth", default=None,
                   help="ground-truth slice file (complex64 + JSON sidecar)")
    p.add_argument("--synth-rank", type=int, default=5,
                   help="rank of the synthesized truth when --truth is omitted")
    p.add_argument("--synth-seed", type=int, default=0)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reciprocity", action=argparse.BooleanOptionalAction,
                   default=True)
    p.add_argument("--out", default=None, help="write the reconstructed slice here")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("experiment", help="run the multi-trial comparison harness")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--output-dir", default=None,
                   help="override the config's output_dir")
    p.add_argument("--verbose", action="store_true",
                   help="per-trial progress on stderr")
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4
    except RuntimeError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
