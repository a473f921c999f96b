"""Command-line front end: ``dispersive <subcommand> --config FILE [--out FILE]``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, NumericalError, ZeroDetuningError
from .sweep import MODES, parse_config, run

SUBCOMMANDS = {mode.replace("_", "-"): mode for mode in MODES}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispersive",
        description="Dispersive qubit-oscillator shifts: exact diagonalization vs closed-form theory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run a {SUBCOMMANDS[name]} configuration")
        p.add_argument("--config", required=True, type=Path, help="key = value run configuration")
        p.add_argument("--out", type=Path, help="CSV output path (overrides 'output' in the config)")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for grid points (default 1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        if cfg.mode != SUBCOMMANDS[args.command]:
            raise ConfigError(f"config mode {cfg.mode!r} does not match subcommand {args.command!r}")
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        csv_text = run(cfg, jobs=args.jobs)
    except (ConfigError, ZeroDetuningError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    out = args.out or (Path(cfg.output) if cfg.output else None)
    if out is None:
        sys.stdout.write(csv_text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
