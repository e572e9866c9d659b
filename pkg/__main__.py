# Codes By Visionnn

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from cli import COLOR_DIM, console, print_banner, print_error
from config import APP_NAME, APP_VERSION, BASE_DIR
from errors import BurstscaleError, ConfigError
from logger import log, set_verbose


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="Packet-level simulation of rack-scale NFV auto-scaling.",
        epilog="Any --section.key=value flag overrides that config key, e.g. --rack.servers=4",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_common(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("-c", "--config", type=Path, help="YAML experiment config")
        p.add_argument("--verbose", action="store_true", help="log progress and write raw metric streams")
        return p

    with_common(sub.add_parser("train", help="train predictors for every configured SLO"))
    run = with_common(sub.add_parser("run", help="simulate every (SLO, mode) cell"))
    run.add_argument("--jobs", type=int, help="parallel worker processes")
    stats = with_common(sub.add_parser("stats", help="summarise a trace"))
    stats.add_argument("--trace", type=Path, help="trace CSV (default: the configured workload)")
    oracle = sub.add_parser("oracle", help="greedy vs exact bucket packing on a small instance")
    oracle.add_argument("instance", type=Path, help="YAML or JSON instance file")
    oracle.add_argument("--verbose", action="store_true")
    return parser


def _split_args(argv: Sequence[str]) -> Tuple[List[str], List[str]]:
    """Separate --section.key=value overrides from regular arguments."""
    regular: List[str] = []
    overrides: List[str] = []
    for arg in argv:
        name = arg[2:].split("=", 1)[0] if arg.startswith("--") else ""
        if "." in name and "=" in arg:
            overrides.append(arg[2:])
        else:
            regular.append(arg)
    return regular, overrides


def _dispatch(args: argparse.Namespace, overrides: List[str]) -> None:
    from experiment import cmd_oracle, cmd_run, cmd_stats, cmd_train
    from settings import load_config

    if args.command == "oracle":
        if overrides:
            raise ConfigError("oracle takes no config overrides")
        cmd_oracle(args.instance)
        return

    extra = list(overrides)
    if args.verbose:
        extra.append("output.verbose=true")
    if getattr(args, "jobs", None) is not None:
        extra.append(f"output.jobs={args.jobs}")

    if args.command == "stats" and args.trace is not None and args.config is None and not extra:
        cmd_stats(trace_path=args.trace)
        return

    config = load_config(args.config, extra)
    if args.command == "train":
        cmd_train(config)
    elif args.command == "run":
        cmd_run(config)
    elif args.command == "stats":
        cmd_stats(config, args.trace)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point. Returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    regular, overrides = _split_args(argv)
    args = _build_parser().parse_args(regular)

    set_verbose(args.verbose)
    BASE_DIR.mkdir(parents=True, exist_ok=True)
    print_banner()
    log.info(f"CLI | command={args.command} overrides={overrides}")

    try:
        _dispatch(args, overrides)
    except KeyboardInterrupt:
        console.print(f"\n\n  [{COLOR_DIM}]Interrupted.[/{COLOR_DIM}]\n")
        return 130
    except BurstscaleError as e:
        print_error(str(e))
        log.exception(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        print_error(f"Unexpected error: {e}")
        log.exception(f"Unexpected error: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
