"""Random-walk histogram of u = <x0, X_t>^2 / r^4 against the exact projective heat kernel.

    python3 scripts/mc_kernel_check.py --m 2 --t 0.5 --steps 500 --paths 100000
"""
import argparse
import time

import numpy as np

from rpdiffusion.manifold import ProjectivePoint
from rpdiffusion.simulation import WalkConfig, kernel_mc_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--bins", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    start = np.zeros(args.m + 1)
    start[-1] = args.r
    t0 = time.perf_counter()
    rep = kernel_mc_check(ProjectivePoint(start, args.r), args.t,
                          WalkConfig(args.steps, args.t, args.seed, args.paths), args.bins)
    print(f"m={rep.m} r={rep.radius:g} t={rep.t:g} steps={rep.steps} paths={rep.n_paths} "
          f"({time.perf_counter() - t0:.1f}s)")
    print(f"{'bin':>14} {'observed':>9} {'expected':>9} {'rel err':>8}")
    for k in range(rep.bins):
        lo, hi = rep.edges[k], rep.edges[k + 1]
        o, e = rep.observed[k], rep.expected[k]
        print(f"[{lo:.4f},{hi:.4f}) {o:9.0f} {e:9.0f} {(o - e) / e:+8.4f}")
    print(f"chi2 = {rep.chi2:.2f} on {rep.bins - 1} dof, max rel err = {rep.max_rel_err:.4f}")


if __name__ == "__main__":
    main()
