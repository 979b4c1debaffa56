"""Batch figure generation from simulator run directories.

    magviz all <rundir> [--out DIR]           full figure set
    magviz energy <rundir> [--out DIR]
    magviz drift <rundir> [--out DIR]
    magviz fields <snapshot> [--out DIR]
    magviz convergence <csv> [--out DIR]

Exit codes: 0 success, 1 schema violation or missing artifact, 2 usage.
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import SchemaError
from . import plots


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="magviz", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command")
    for name, target in (("all", "rundir"), ("energy", "rundir"), ("drift", "rundir"),
                         ("fields", "snapshot"), ("convergence", "csv")):
        p = sub.add_parser(name)
        p.add_argument(target)
        p.add_argument("--out", default=None)
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    if args.command is None:
        parser.print_usage()
        return 2
    try:
        if args.command == "all":
            made = plots.plot_all(args.rundir, args.out)
        elif args.command == "energy":
            made = plots.plot_energy(args.rundir, args.out)
        elif args.command == "drift":
            made = plots.plot_drift(args.rundir, args.out)
        elif args.command == "fields":
            made = plots.plot_fields(args.snapshot, args.out)
        else:
            made = plots.plot_convergence(args.csv, args.out)
    except (SchemaError, OSError) as err:
        print(f"magviz {args.command}: error: {err}", file=sys.stderr)
        return 1
    print(f"magviz {args.command}: wrote {len(made)} figure(s)")
    for path in made:
        print(f"  {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
