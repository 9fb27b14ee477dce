"""Command line entry point: ``run``, ``bound`` and ``verify``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import FIGURE_PRESETS, ConfigError, load_config, preset_config

log = logging.getLogger("detfnc")


def _config(args):
    if args.preset:
        cfg = preset_config(args.preset)
        if args.config:
            base = load_config(args.config)
            cfg = cfg.replace(seed=base.seed, min_errors=base.min_errors, max_trials=base.max_trials, batch=base.batch)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("give --config or --preset")
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _cmd_run(args) -> int:
    from .engine import run_curve
    from .io import emit_results

    cfg = _config(args)
    log.info("running %s (seed %d, %d worker(s))", cfg.name, cfg.seed, args.workers)
    report = run_curve(cfg, workers=args.workers)
    for path in emit_results(report, args.out):
        print(path)
    return 0


def _cmd_bound(args) -> int:
    from .engine import run_bounds

    cfg = _config(args)
    if not cfg.bounds:
        cfg = cfg.replace(bounds=["union-min-info", "union-qinv-info"])
    for p in run_bounds(cfg).points:
        print(f"{p.snr_db:6.2f}  {p.label:22s}  {p.error_rate:.6e}")
    return 0


def _cmd_verify(args) -> int:
    from .oracles import run_verification

    ok = True
    for name, passed, detail in run_verification(seed=args.seed or 0):
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        ok &= passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="detfnc", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate error-rate curves")
    run.add_argument("--config")
    run.add_argument("--preset", choices=sorted(FIGURE_PRESETS))
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int, default=1)
    run.set_defaults(func=_cmd_run)

    bound = sub.add_parser("bound", help="evaluate union bounds only")
    bound.add_argument("--config")
    bound.add_argument("--preset", choices=sorted(FIGURE_PRESETS))
    bound.add_argument("--seed", type=int)
    bound.set_defaults(func=_cmd_bound)

    ver = sub.add_parser("verify", help="run the brute-force oracle checks")
    ver.add_argument("--seed", type=int)
    ver.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
