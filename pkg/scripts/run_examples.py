"""Run the four built-in scenario sweeps and summarize each one.

Desk-scale by default (50 runs); pass --runs 200 for full-size averages.
"""

import argparse
from pathlib import Path

from beamsim.cli import main as beamsim


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    parser.add_argument("--runs", type=int, default=50)
    parser.add_argument("--seed", type=int, default=20240601)
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    for example in (1, 2, 3, 4):
        out = args.outdir / f"example{example}.csv"
        print(f"== example {example} -> {out}")
        rc = beamsim([
            "run", "--example", str(example), "--runs", str(args.runs),
            "--seed", str(args.seed), "--out", str(out),
        ])
        if rc != 0:
            raise SystemExit(rc)
        beamsim(["summarize", "--in", str(out),
                 "--out", str(args.outdir / f"example{example}_summary.csv")])

    # the snapshot-count variant of example 1 (fixed SNR)
    out = args.outdir / "example1_vs_T.csv"
    print(f"== example 1 snapshot sweep -> {out}")
    rc = beamsim([
        "run", "--example", "1", "--snr-min", "30", "--snr-max", "30",
        "--snapshot-sweep", "30,60,100,200,300", "--runs", str(args.runs),
        "--seed", str(args.seed), "--out", str(out),
    ])
    if rc != 0:
        raise SystemExit(rc)
    beamsim(["summarize", "--in", str(out),
             "--out", str(args.outdir / "example1_vs_T_summary.csv")])


if __name__ == "__main__":
    main()
