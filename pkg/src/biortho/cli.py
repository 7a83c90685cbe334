"""Command-line entry point.

::

    biortho list
    biortho run CONFIG.json [--output-dir DIR] [--seed N]

Exit status: 0 all checks passed, 1 a check failed, 2 configuration error,
3 filesystem error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .config import ConfigError, load_config
from .scenarios import SCENARIOS, run_scenario

log = logging.getLogger("biortho")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_FS = 0, 1, 2, 3


def _list(args) -> int:
    width = max(map(len, SCENARIOS))
    for name, (_, desc, anchors) in SCENARIOS.items():
        print(f"{name:<{width}}  {desc}  [{', '.join(anchors)}]")
    return EXIT_OK


def _run(args) -> int:
    overrides = {"seed": args.seed, "output_dir": args.output_dir}
    try:
        cfg, params = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_FS
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_FS
    t0 = time.perf_counter()
    try:
        checks = run_scenario(cfg, params, out, args.timestamp)
    except OSError as exc:
        print(f"filesystem error: {exc}", file=sys.stderr)
        return EXIT_FS
    except ValueError as exc:
        # parameter combinations that validate individually but not together
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    ok = all(c.passed for c in checks)
    report = {"scenario": cfg.scenario, "seed": cfg.seed, "pass": ok,
              "checks": [c.to_json() for c in checks]}
    try:
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"filesystem error: {exc}", file=sys.stderr)
        return EXIT_FS
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<40} {c.value:.6g}  ({c.tolerance})")
    log.info("%s finished in %.1f s", cfg.scenario, time.perf_counter() - t0)
    print(f"{cfg.scenario}: {'PASS' if ok else 'FAIL'}; report written to {out / 'report.json'}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biortho", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list scenarios").set_defaults(func=_list)
    r = sub.add_parser("run", help="run a scenario from a JSON config")
    r.add_argument("config", help="scenario config file (JSON)")
    r.add_argument("--output-dir", default=None, help="override output_dir")
    r.add_argument("--seed", type=int, default=None, help="override seed")
    r.add_argument("--timestamp", default=None,
                   help="fixed metadata stamp for CSV files (default: current UTC time)")
    r.set_defaults(func=_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
