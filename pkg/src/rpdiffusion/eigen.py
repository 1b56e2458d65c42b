"""Second-moment matrix E[XX^T] and its eigendecomposition by cyclic Jacobi rotations."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .manifold import EmpiricalDistribution, ProjectivePoint, canonicalize

DEFAULT_MULT_TOL = 1e-6


def jacobi_eigh(A: np.ndarray, rtol: float = 1e-13, max_sweeps: int = 100):
    """Eigenvalues (descending) and orthonormal eigenvectors (columns) of symmetric ``A``.

    Cyclic-by-row Jacobi; stops when the off-diagonal Frobenius norm falls
    below ``rtol * scale`` where scale is |trace| (or the Frobenius norm if
    the trace vanishes). For positive semidefinite input |trace| dominates;
    otherwise the Frobenius norm sets the scale.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValidationError("jacobi_eigh needs a square matrix")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValidationError("jacobi_eigh needs a symmetric matrix")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    # |trace| for the PSD matrices used here; the Frobenius norm keeps indefinite input reachable
    scale = max(abs(np.trace(A)), np.linalg.norm(A)) or 1.0
    target = rtol * scale

    mask = ~np.eye(n, dtype=bool)

    def off(M):
        return float(np.linalg.norm(M[mask]))

    sweeps = 0
    while off(A) >= target:
        if sweeps >= max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) < 1e-18 * max(abs(A[p, p]), abs(A[q, q])):
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                tt = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(tt * tt + 1.0)
                s = tt * c
                # A <- J^T A J with J the (p, q) rotation
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    V = canonicalize(V.T, 1.0).T
    return w, V


@dataclass(frozen=True, eq=False)
class SecondMoment:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    top_multiplicity: int
    gap: float
    radius: float
    mult_tol: float

    @property
    def m(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def top_eigenspace(self) -> np.ndarray:
        """Orthonormal basis (columns) of the top eigenspace."""
        return self.eigenvectors[:, : self.top_multiplicity]

    def eigenspace_residual(self, y: np.ndarray) -> float:
        """Residual distance from [y] to the nearest class in the top eigenspace."""
        y = np.asarray(y, dtype=float)
        u = y / np.linalg.norm(y)
        B = self.top_eigenspace
        return min(1.0, float(np.linalg.norm(u - B @ (B.T @ u))))


def second_moment_matrix(dist: EmpiricalDistribution) -> np.ndarray:
    X = dist.coords
    M = (X * dist.weights[:, None]).T @ X
    return 0.5 * (M + M.T)


def second_moment(dist: EmpiricalDistribution, mult_tol: float = DEFAULT_MULT_TOL) -> SecondMoment:
    """E[XX^T] for the law ``dist`` with its spectrum.

    ``mult_tol`` is relative: eigenvalues within ``mult_tol * lambda_1`` of
    lambda_1 count towards the top multiplicity.
    """
    M = second_moment_matrix(dist)
    w, V = jacobi_eigh(M)
    mult = int(np.sum(w >= w[0] - mult_tol * abs(w[0])))
    gap = float(w[0] - w[1]) if w.size > 1 else 0.0
    for a in (M, w, V):
        a.setflags(write=False)
    return SecondMoment(M, w, V, mult, gap, dist.radius, mult_tol)


@dataclass(frozen=True, eq=False)
class LimitPrediction:
    """Predicted long-time limit: a single class if unique, else a scaled eigenspace basis."""

    points: list
    multiplicity: int
    unique: bool
    eigenvalues: np.ndarray
    gap: float

    @property
    def flag(self) -> str:
        return "unique" if self.unique else f"eigenspace dimension {self.multiplicity}"


def limit_set_prediction(sm: SecondMoment, r: float | None = None) -> LimitPrediction:
    r = sm.radius if r is None else float(r)
    basis = sm.top_eigenspace
    points = [ProjectivePoint(r * basis[:, j], r) for j in range(basis.shape[1])]
    return LimitPrediction(points, sm.top_multiplicity, sm.top_multiplicity == 1,
                           sm.eigenvalues, sm.gap)
