"""Batch figure tool for splitflow report CSVs.

``plotviz <kind> --input <csv>... --output <path>`` renders one image
per invocation.  The output format follows the file extension, PNG by
default; --format forces a specific backend (svg and pdf give vector
output).  Exit codes: 0 success, 1 refit disagreement with the CSV
header values, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .fits import FIT_TOLERANCE, mismatches
from .render import (
    FigureRequest,
    plot_convergence,
    plot_energy,
    plot_order_reduction,
)

_PLOTTERS = {
    "convergence": plot_convergence,
    "energy": plot_energy,
    "order-reduction": plot_order_reduction,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotviz",
        description="Render figures from splitflow report CSVs",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, help_text in (
        ("convergence", "log-log global error vs step size, one panel per problem"),
        ("energy", "energy deviation over time on a log scale"),
        ("order-reduction", "scalar probe defects with fitted slopes"),
    ):
        p = sub.add_parser(kind, help=help_text)
        p.add_argument(
            "--input",
            metavar="CSV",
            nargs="+",
            required=True,
            help="one or more report files of this kind",
        )
        p.add_argument(
            "--output", metavar="PATH", required=True, help="image file to write"
        )
        p.add_argument("--title", help="figure title override")
        p.add_argument(
            "--label",
            action="append",
            default=[],
            metavar="TEXT",
            help="series label override, one per input in order",
        )
        p.add_argument(
            "--format",
            choices=("png", "svg", "pdf"),
            help="output format (default: from the extension, else png)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        request = FigureRequest(
            inputs=tuple(args.input),
            kind=args.kind,
            output=args.output,
            title=args.title,
            labels=tuple(args.label),
            image_format=args.format,
        )
        comparisons = _PLOTTERS[args.kind](request)
    except (ValueError, OSError) as err:
        print(f"plotviz: error: {err}", file=sys.stderr)
        return 2
    disagreeing = mismatches(comparisons)
    for c in disagreeing:
        print(
            f"plotviz: fit mismatch: {c.name} reported={c.reported:.6f} "
            f"refit={c.refit:.6f} (tolerance {FIT_TOLERANCE})",
            file=sys.stderr,
        )
    return 1 if disagreeing else 0


if __name__ == "__main__":
    sys.exit(main())
