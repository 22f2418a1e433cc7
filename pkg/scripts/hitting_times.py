"""Hitting times of the merging controller from random starts."""

import argparse
import math

import numpy as np

from vicsek_mean.ensemble import ControllerNoise, hitting_time_stats
from vicsek_mean.initial import TwoClustersInit, UniformInit
from vicsek_mean.model import SimParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--horizon", type=int, default=5000)
    ap.add_argument("--two-clusters", type=float, metavar="GAP", help="start from two coincident groups GAP apart")
    ap.add_argument("--threads", type=int, default=0)
    args = ap.parse_args()

    p = SimParams(n=args.n, B=40.0, r=8.0, v=2.0, delta=args.delta, seed=args.seed, horizon=args.horizon)
    eps = p.r / 3
    init = TwoClustersInit(args.two_clusters) if args.two_clusters else UniformInit(-math.pi, math.pi)
    st = hitting_time_stats(p, eps, args.runs, init, ControllerNoise(epsilon=eps), workers=args.threads)
    hits = np.array([s for s in st.samples if s is not None])
    print(f"epsilon={eps:.4g} runs={args.runs} finite_fraction={st.finite_fraction:.3f}")
    if hits.size:
        print(f"hitting time: median={np.median(hits):g} mean={hits.mean():.1f} max={hits.max()}")
    for k, (s, log) in enumerate(zip(st.samples, st.phase_logs)):
        phases = sorted(set(log))
        print(f"run {k:3d}: {'censored' if s is None else s:>8}  phases={phases}")


if __name__ == "__main__":
    main()
