"""Union bounds of the equivalent networks and the diversity orders they imply."""

import argparse

import numpy as np

from detfnc.analysis import diversity_estimate, equivalent_snr_vector, error_free_snr_vector, union_bound
from detfnc.channel import db_to_linear, stream
from detfnc.codec import preset_code
from detfnc.equivalent import EquivalentKind


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--codes", nargs="+", default=["G2", "G3", "G1"])
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--snr-db", type=float, nargs="+", default=list(np.arange(0.0, 41.0, 5.0)))
    ap.add_argument("--qinv-trials", type=int, default=100_000)
    args = ap.parse_args()

    for name in args.codes:
        code = preset_code(name)
        curves = {"errfree": [], "min": [], "qinv": []}
        print(f"{name} (q={code.q}, m={args.m:g})")
        print(f"  {'dB':>5} {'error-free':>12} {'minimum':>12} {'Q-inverse':>12}")
        for i, db in enumerate(args.snr_db):
            g = float(db_to_linear(db))
            vecs = {
                "errfree": error_free_snr_vector(code, g, args.m),
                "min": equivalent_snr_vector(code, g, args.m, EquivalentKind.MINIMUM),
                "qinv": equivalent_snr_vector(code, g, args.m, EquivalentKind.Q_INVERSE, args.qinv_trials, stream(0, i)),
            }
            row = {k: union_bound(code, v, "info") for k, v in vecs.items()}
            for k, v in row.items():
                curves[k].append((db, v))
            print(f"  {db:5.1f} {row['errfree']:12.4e} {row['min']:12.4e} {row['qinv']:12.4e}")
        for k, c in curves.items():
            d = diversity_estimate(c)
            print(f"  diversity ({k}): two-point {d.two_point:.3f}, least squares {d.least_squares:.3f}")


if __name__ == "__main__":
    main()
