"""``fsfmas`` command line: simulate, replay, plot, rerun.

Exit codes: 0 success, 1 configuration/input error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ConfigError, FsfError, ParseError


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsfmas", description=(
        "Factual-agent representation of an emergency situation from FSF streams."))
    p.add_argument("--version", action="version", version=f"fsfmas {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run the toy fire world through the MAS")
    s.add_argument("--world", required=True, help="world spec JSON")
    s.add_argument("--seed", type=int, help="override the world seed")
    s.add_argument("--cycles", type=int, help="number of cycles (default: world total_cycles)")
    s.add_argument("--config", help="MAS config JSON (default: shipped defaults)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--snapshots", action="store_true", help="also write snapshots.jsonl")

    r = sub.add_parser("replay", help="feed a .fsf or .jsonl trace through the MAS")
    r.add_argument("--trace", required=True)
    r.add_argument("--config")
    r.add_argument("--cycles", type=int, help="default: last trace cycle + 1")
    r.add_argument("--out", required=True)
    r.add_argument("--snapshots", action="store_true")

    pl = sub.add_parser("plot", help="render SVG charts from a run directory")
    pl.add_argument("--in", dest="in_dir", required=True)
    what = pl.add_mutually_exclusive_group(required=True)
    what.add_argument("--agent", type=int, help="indicator and state charts of one agent")
    what.add_argument("--activities", action="store_true", help="activities per cycle")
    pl.add_argument("--out", help="directory for the SVGs (default: --in)")

    m = sub.add_parser("rerun", help="reproduce a run from its manifest.json")
    m.add_argument("--manifest", required=True)
    m.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    from . import runner
    from .plotting import PlotError, plot_activities, plot_agent

    try:
        if args.command == "simulate":
            if args.cycles is not None and args.cycles < 0:
                raise ConfigError("--cycles must be >= 0")
            runner.run_simulate(args.world, args.out, args.config, args.seed, args.cycles,
                                args.snapshots)
        elif args.command == "replay":
            if args.cycles is not None and args.cycles < 0:
                raise ConfigError("--cycles must be >= 0")
            runner.run_replay(args.trace, args.out, args.config, args.cycles, args.snapshots)
        elif args.command == "plot":
            if args.activities:
                print(plot_activities(args.in_dir, args.out))
            else:
                for path in plot_agent(args.in_dir, args.agent, args.out):
                    print(path)
        else:
            runner.run_from_manifest(args.manifest, args.out)
    except (ConfigError, ParseError, FsfError, PlotError, OSError) as exc:
        print(f"fsfmas: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"fsfmas: runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
