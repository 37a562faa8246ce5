"""Flag-style command line for the renderers.

Examples:

    heatfigs profiles --out fig3.png profile_k1.csv profile_k2.csv ...
    heatfigs series --out run.png --beta 3.0 --t0 0.5 series.csv
    heatfigs overlay --out collapse.png --reference reference.csv rep_*.csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, SchemaError, render

_KINDS = {"profiles": "profiles", "series": "series", "overlay": "representation_overlay"}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="heatfigs", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)
    for name in _KINDS:
        p = sub.add_parser(name)
        p.add_argument("inputs", nargs="+", type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--logx", action="store_true")
        p.add_argument("--logy", action="store_true")
        p.add_argument("--labels", default=None, help="comma separated curve labels")
        if name == "overlay":
            p.add_argument("--reference", required=True, type=Path)
        if name == "series":
            p.add_argument("--beta", type=float, default=None)
            p.add_argument("--t0", type=float, default=None)

    args = parser.parse_args(argv)
    labels = args.labels.split(",") if args.labels else []
    try:
        spec = PlotSpec(
            inputs=list(args.inputs),
            kind=_KINDS[args.kind],
            output=args.out,
            logx=args.logx,
            logy=args.logy,
            labels=labels,
            reference=getattr(args, "reference", None),
            beta=getattr(args, "beta", None),
            t0=getattr(args, "t0", None),
        )
        render(spec)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
