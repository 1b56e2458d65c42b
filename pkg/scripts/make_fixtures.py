"""Write the convergence test laws to tests/fixtures/ (unit radius CSV)."""
from pathlib import Path

import numpy as np

from rpdiffusion.io import points_csv

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

LAWS = {
    "rp2_three_point.csv": (
        [[1.0, 0.0, 0.0], [0.6, 0.8, 0.0], [0.2, 0.3, 0.9]],
        [0.5, 0.3, 0.2],
    ),
    "rp2_five_point.csv": (
        [[0.9, 0.1, 0.4], [0.2, 1.0, 0.1], [-0.3, 0.5, 0.8], [0.7, -0.6, 0.3], [0.1, 0.2, -1.0]],
        [0.3, 0.25, 0.2, 0.15, 0.1],
    ),
    "rp3_six_point.csv": (
        [[1.0, 0.2, 0.0, 0.1], [0.3, 0.9, 0.2, -0.1], [0.0, 0.4, 1.0, 0.3],
         [0.5, -0.2, 0.3, 0.8], [-0.6, 0.5, 0.1, 0.6], [0.2, 0.1, -0.7, 0.7]],
        [0.25, 0.2, 0.2, 0.15, 0.1, 0.1],
    ),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (pts, w) in LAWS.items():
        X = np.array(pts, dtype=float)
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        (OUT / name).write_text(points_csv(X, w))
        print("wrote", OUT / name)


if __name__ == "__main__":
    main()
