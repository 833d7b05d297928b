"""Standalone renderer: one figure kind from harness CSV tables."""
import argparse
import sys

from .render import KINDS, SchemaMismatchError, render_figure


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hmimo-figures",
        description="Render harness CSV output to a PNG figure.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csv", nargs="+", help="input CSV file(s)")
    parser.add_argument("-o", "--out", default=None,
                        help="output image path (default: <kind>.png)")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    out = args.out if args.out is not None else f"{args.kind}.png"
    try:
        path = render_figure(args.kind, args.csv, out, dpi=args.dpi,
                             title=args.title)
    except (SchemaMismatchError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
