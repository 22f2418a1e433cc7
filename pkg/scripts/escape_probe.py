"""Bisection for a noise amplitude that keeps a cohesive flock from spreading past a."""

import argparse

from vicsek_mean.ensemble import escape_delta_search
from vicsek_mean.initial import ClusterInit
from vicsek_mean.model import SimParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--horizon", type=int, default=200)
    ap.add_argument("--hi", type=float, default=0.4)
    ap.add_argument("--iterations", type=int, default=4)
    ap.add_argument("--rho", type=float, default=0.05)
    ap.add_argument("--threads", type=int, default=0)
    args = ap.parse_args()

    p = SimParams(n=5, B=40.0, r=8.0, v=2.0, delta=args.hi, seed=args.seed, horizon=args.horizon)
    res = escape_delta_search(
        p, p.r, args.runs, ClusterInit(p.r / 3 * 0.999), args.rho, args.hi, args.iterations, args.threads
    )
    for delta, upper, ok in res.tested:
        print(f"delta={delta:.5g}  max Wilson upper bound={upper:.4f}  {'pass' if ok else 'fail'}")
    print(f"largest passing delta: {res.best_delta}")


if __name__ == "__main__":
    main()
