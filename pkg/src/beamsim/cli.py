"""Command-line entry point: run sweeps, summarize results, dump sector data."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .estimators import Certificate
from .experiments import (
    BEAMFORMER_LABELS,
    SweepSpec,
    builtin_example,
    format_summary,
    read_results,
    run_sweep,
    summarize,
    write_summary,
)
from .sectors import benchmark_curves, build_sector_model, dump_sector_model


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamsim",
                                     description="robust adaptive beamforming simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo sweep for a built-in example")
    run.add_argument("--example", type=int, required=True, choices=(1, 2, 3, 4))
    run.add_argument("--snr-min", type=float, default=-10.0)
    run.add_argument("--snr-max", type=float, default=60.0)
    run.add_argument("--snr-step", type=float, default=5.0)
    run.add_argument("--snapshots", type=int, default=None,
                     help="fixed training size (default: the example's)")
    run.add_argument("--snapshot-sweep", type=str, default=None,
                     help="comma-separated training sizes; overrides --snapshots")
    run.add_argument("--runs", type=int, default=50)
    run.add_argument("--seed", type=int, default=20240601)
    run.add_argument("--beamformers", type=str, default=None,
                     help=f"comma-separated subset of {','.join(BEAMFORMER_LABELS)}")
    run.add_argument("--out", type=str, required=True)
    run.add_argument("--timing", action="store_true",
                     help="record wall-clock solve times (breaks byte-for-byte reproducibility)")
    run.add_argument("--allow-failures", action="store_true")

    summ = sub.add_parser("summarize", help="aggregate a results CSV")
    summ.add_argument("--in", dest="input", type=str, required=True)
    summ.add_argument("--out", type=str, default=None, help="also write the summary as CSV")

    dump = sub.add_parser("sector-dump", help="print benchmark thresholds and curves")
    dump.add_argument("--theta-min", type=float, required=True)
    dump.add_argument("--theta-max", type=float, required=True)
    dump.add_argument("--n", type=int, required=True)
    dump.add_argument("--grid-step", type=float, default=0.1)
    dump.add_argument("--curve-step", type=float, default=1.0)
    dump.add_argument("--out", type=str, default=None,
                      help="write the full sector model dump to this file")
    return parser


def _cmd_run(args) -> int:
    setup = builtin_example(args.example)
    if args.snapshot_sweep:
        snapshot_grid = tuple(int(x) for x in args.snapshot_sweep.split(","))
    elif args.snapshots is not None:
        snapshot_grid = (args.snapshots,)
    else:
        snapshot_grid = (setup.config.snapshots,)
    if args.beamformers:
        beamformers = tuple(args.beamformers.split(","))
    else:
        beamformers = setup.defaults.beamformers
    n_steps = int(round((args.snr_max - args.snr_min) / args.snr_step))
    snr_grid = tuple(args.snr_min + k * args.snr_step for k in range(n_steps + 1))
    spec = SweepSpec(
        example_id=args.example,
        snr_grid=snr_grid,
        snapshot_grid=snapshot_grid,
        runs=args.runs,
        beamformers=beamformers,
        master_seed=args.seed,
        output_path=args.out,
        record_timing=args.timing,
    )
    rows = run_sweep(spec, setup)
    failures = sum(1 for r in rows if r.certificate == Certificate.FAILED.value)
    print(f"wrote {len(rows)} rows to {args.out} ({failures} failed solves)")
    if failures and not args.allow_failures:
        print("failing because of failed certificates (use --allow-failures to ignore)",
              file=sys.stderr)
        return 1
    return 0


def _cmd_summarize(args) -> int:
    rows = read_results(args.input)
    summary = summarize(rows)
    print(format_summary(summary))
    if args.out:
        write_summary(args.out, summary)
    return 0


def _cmd_sector_dump(args) -> int:
    model = build_sector_model((args.theta_min, args.theta_max), args.n, grid_step=args.grid_step)
    print(f"delta0 = {model.delta0:.12e}")
    print(f"delta1 = {model.delta1:.12e}")
    thetas = np.arange(-90.0, 90.0 + args.curve_step / 2, args.curve_step)
    complement_form, sector_form = benchmark_curves(model, thetas)
    print("theta_deg,complement_form,sector_form")
    for theta, cf, sf in zip(thetas, complement_form, sector_form):
        print(f"{theta:.3f},{cf:.9e},{sf:.9e}")
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(dump_sector_model(model))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "summarize":
        return _cmd_summarize(args)
    return _cmd_sector_dump(args)


if __name__ == "__main__":
    sys.exit(main())
