"""Gap between the Q-inverse and minimum equivalent SNRs on symmetric links."""

import argparse

from detfnc.channel import db_to_linear, stream
from detfnc.codec import preset_code
from detfnc.equivalent import equivalent_gamma_samples, min_avg_snr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--code", default="G2")
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--snr-db", type=float, nargs="+", default=[10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0])
    args = ap.parse_args()

    code = preset_code(args.code)
    print(f"{'dB':>5} {'E[qinv]':>12} {'E[min]':>12} {'exact E[min]':>13} {'paired gap':>11}")
    for db in args.snr_db:
        g = float(db_to_linear(db))
        q, mn = equivalent_gamma_samples(code, 0, g, g, args.m, args.trials, stream(1, int(db * 10)))
        gap = abs(q.mean() - mn.mean()) / mn.mean()
        print(f"{db:5.1f} {q.mean():12.4f} {mn.mean():12.4f} {min_avg_snr(g, g, args.m):13.4f} {gap:11.2e}")


if __name__ == "__main__":
    main()
