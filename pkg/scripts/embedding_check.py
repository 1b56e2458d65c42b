"""Chordal identity and first-order isometry of the embedding Phi for m = 2..8."""
import time

from rpdiffusion.extrinsic import chordal_identity_errors, embedding_dim, isometry_errors, special_radius


def main():
    print(f"{'m':>2} {'dim':>4} {'r_m':>9} {'identity err':>13} {'isometry err':>13}")
    t0 = time.perf_counter()
    for m in range(2, 9):
        ident = chordal_identity_errors(m, 10_000, seed=m).max()
        iso = isometry_errors(m, 1000, s=1e-4, seed=10 + m).max()
        print(f"{m:2d} {embedding_dim(m):4d} {special_radius(m):9.6f} {ident:13.2e} {iso:13.2e}")
    print(f"{time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
