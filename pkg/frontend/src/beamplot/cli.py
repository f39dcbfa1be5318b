"""Command-line chart rendering: plot_results --in ... --x ... --y ... --out ..."""

from __future__ import annotations

import argparse
import sys

from .figures import X_AXES, Y_AXES, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot_results",
                                     description="render line charts from sweep results")
    parser.add_argument("--in", dest="input", required=True, help="results CSV path")
    parser.add_argument("--x", dest="x_axis", default="snr_db", choices=X_AXES)
    parser.add_argument("--y", dest="y_axis", default="output_sinr_db", choices=Y_AXES)
    parser.add_argument("--out", dest="output", required=True, help="image file to write")
    parser.add_argument("--error-bands", action="store_true",
                        help="shade one standard deviation around each mean line")
    args = parser.parse_args(argv)
    spec = FigureSpec(input_path=args.input, output_path=args.output,
                      x_axis=args.x_axis, y_axis=args.y_axis,
                      error_bands=args.error_bands)
    path = render(spec)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
