"""Per-step heading-spread decrease under the angle schedule.

Prints the observed decrease next to 2*alpha and next to the complete-graph
value spread - (alpha + delta), for connected chain starts.
"""

import argparse
import math

import numpy as np

from vicsek_mean.control import Phase, merge_controller
from vicsek_mean.model import SimParams, WorldState, connected_components, d_theta_metric, step


def chain(rng, n, r, B):
    x = [rng.uniform(r, B - r, 2)]
    while len(x) < n:
        a, d = rng.uniform(0, 2 * math.pi), rng.uniform(0.3, 0.95) * r
        q = x[-1] + d * np.array([math.cos(a), math.sin(a)])
        if np.all((q > 0) & (q < B)):
            x.append(q)
    return np.array(x)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=505)
    ap.add_argument("--starts", type=int, default=20)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--spread", type=float, default=1.0, help="initial headings uniform on [-spread/2, spread/2]")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    delta, alpha = args.delta, args.delta / 2
    p = SimParams(n=5, B=40.0, r=8.0, v=2.0, delta=delta, seed=args.seed)
    print("start  spread   decrease  2*alpha  complete-graph decrease  ok")
    for k in range(args.starts):
        w = WorldState(rng.uniform(-args.spread / 2, args.spread / 2, p.n), chain(rng, p.n, p.r, p.B))
        for _ in range(200):
            xi, ph = merge_controller(w, p, alpha=alpha)
            nxt = step(w, p, xi)
            s = d_theta_metric(w)
            single = len(connected_components(w, p.r)) == 1 and len(connected_components(nxt, p.r)) == 1
            if ph.phase is Phase.ANGLE_CONTRACT and single and s > 2 * delta:
                dec = s - d_theta_metric(nxt)
                print(f"{k:5d}  {s:.4f}  {dec:9.4f}  {2 * alpha:7.3f}  {s - (alpha + delta):23.4f}  {dec >= 2 * alpha}")
            w = nxt


if __name__ == "__main__":
    main()
