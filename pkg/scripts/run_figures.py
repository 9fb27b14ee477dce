"""Simulate the figure presets and write long and plot-ready CSVs.

Example:
    python3 scripts/run_figures.py --out results --max-trials 1000000
    python3 scripts/run_figures.py fig-2user-gf2-m1-hard --workers 4
"""

import argparse
import time

from detfnc.harness.config import FIGURE_PRESETS, preset_config
from detfnc.harness.engine import run_curve
from detfnc.harness.io import emit_results


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("presets", nargs="*", default=sorted(FIGURE_PRESETS))
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-trials", type=int, default=10_000_000)
    ap.add_argument("--min-errors", type=int, default=50)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    for name in args.presets:
        cfg = preset_config(name, seed=args.seed, max_trials=args.max_trials, min_errors=args.min_errors)
        t0 = time.perf_counter()
        report = run_curve(cfg, workers=args.workers)
        paths = emit_results(report, args.out)
        print(f"{name}: {time.perf_counter() - t0:.1f} s -> {paths[0]}")
        for p in report.points:
            flag = " (censored)" if p.censored else ""
            print(f"  {p.snr_db:5.1f} dB  {p.label:18s} {p.error_rate:.3e}  errors={p.errors} trials={p.trials}{flag}")


if __name__ == "__main__":
    main()
