"""Long-time convergence sweeps on the fixture laws, one table per law.

    python3 scripts/run_sweep.py [--radius 2.0] [--grid 1,2,5,10,20,40]
"""
import argparse
import time
from pathlib import Path

from rpdiffusion.convergence import SweepSpec, extrinsic_consistency, run_sweep, short_time_baseline
from rpdiffusion.heat_kernel import KernelConfig
from rpdiffusion.io import load_points

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--grid", default="0.1,1,2,5,10,20,40", help="times in units of r^2")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    grid = [float(g) * args.radius ** 2 for g in args.grid.split(",")]

    for path in sorted(FIXTURES.glob("*.csv")):
        dist = load_points(path).rescaled(args.radius)
        spec = SweepSpec(dist, grid, KernelConfig(dist.m, dist.radius), seed=args.seed)
        t0 = time.perf_counter()
        res = run_sweep(spec)
        print(f"\n{path.stem}  m={dist.m} r={dist.radius:g}  ({time.perf_counter() - t0:.1f}s)")
        print(f"{'t':>8} {'to limit':>12} {'to extrinsic':>13} {'objective':>20}")
        for row in res.rows:
            print(f"{row.t:8.3g} {row.dist_to_limit:12.3e} {row.dist_to_extrinsic:13.3e} "
                  f"{row.objective:20.15f}")
        v = res.verdict
        print(f"verdict {v['status']}: final {v['final_distance']:.2e}, "
              f"max increment {v['max_increment']:.2e}, inversions {v['inversions']}")
        ext = extrinsic_consistency(spec, None)
        if ext["passed"] is not None:
            print(f"extrinsic at r_m={ext['radius']:.6f}: vs eigen {ext['extrinsic_vs_eigen']:.2e}, "
                  f"vs diffusion {ext['extrinsic_vs_diffusion']:.2e} ({ext['extrinsic_status']})")
        else:
            print("extrinsic:", ext["flag"])
        base = short_time_baseline(spec, res)
        print(f"intrinsic baseline: t={base['t_short']:g} {base['distance_short']:.3e}, "
              f"t={base['t_long']:g} {base['distance_long']:.3e}")


if __name__ == "__main__":
    main()
