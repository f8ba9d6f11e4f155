"""Command line: mla-plots {convergence|line|heatmap} --in F --out F."""

from __future__ import annotations

import argparse
import sys

from .io import MissingColumns
from .plots import PlotJob


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mla-plots",
        description="Render figures from solver CSV outputs")
    ap.add_argument("kind", choices=("convergence", "line", "heatmap"))
    ap.add_argument("--in", dest="input_path", required=True)
    ap.add_argument("--out", dest="output_path", required=True)
    ap.add_argument("--field", default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(input_path=args.input_path, kind=args.kind,
                  output_path=args.output_path, field=args.field)
    try:
        path = job.run()
    except FileNotFoundError as exc:
        print(f"input not found: {exc}", file=sys.stderr)
        return 2
    except MissingColumns as exc:
        print(f"bad table: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
