"""Points, quotient map and metrics on S^m(r) and RP^m(r).

Projective classes are stored through a canonical representative: the sphere
point whose first coordinate of magnitude above ``1e-12 * r`` is positive.
Everything here is immutable; arrays handed out are read-only views.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

CANON_EPS = 1e-12
WEIGHT_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_radius(r: float) -> float:
    r = float(r)
    if not (r > 0.0 and math.isfinite(r)):
        raise ValidationError(f"radius must be positive and finite, got {r!r}")
    return r


def _check_dim(n_coords: int) -> int:
    m = n_coords - 1
    if m < 2:
        raise ValidationError(f"dimension m must be >= 2 (got m={m})")
    return m


def normalize_rows(X: np.ndarray, r: float) -> np.ndarray:
    """Scale each row of ``X`` onto the sphere of radius ``r``."""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=-1, keepdims=True)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise ValidationError("cannot project a zero or non-finite vector onto the sphere")
    return X * (r / norms)


def canonical_signs(X: np.ndarray, r: float) -> np.ndarray:
    """Sign (+1/-1) that makes the first significant coordinate of each row positive.

    "Significant" means above CANON_EPS times the row norm (= r on the sphere),
    so the rule gives the same answer before and after normalization.
    """
    X = np.atleast_2d(X)
    significant = np.abs(X) > CANON_EPS * np.linalg.norm(X, axis=1, keepdims=True)
    first = np.argmax(significant, axis=1)
    lead = X[np.arange(X.shape[0]), first]
    return np.where(lead < 0.0, -1.0, 1.0)


def canonicalize(X: np.ndarray, r: float) -> np.ndarray:
    """Canonical representatives of the rows of ``X`` (assumed already on S^m(r))."""
    X = np.asarray(X, dtype=float)
    flat = np.atleast_2d(X)
    out = flat * canonical_signs(flat, r)[:, None]
    return out.reshape(X.shape)


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A point x on S^m(r); coordinates are renormalized on construction."""

    coords: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        r = _check_radius(self.radius)
        x = np.array(self.coords, dtype=float)
        if x.ndim != 1:
            raise ValidationError("coords must be a 1-D vector")
        _check_dim(x.size)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "coords", _frozen(normalize_rows(x, r)))

    @property
    def m(self) -> int:
        return self.coords.size - 1

    def __neg__(self) -> "SpherePoint":
        out = object.__new__(SpherePoint)
        object.__setattr__(out, "coords", _frozen(-self.coords))
        object.__setattr__(out, "radius", self.radius)
        return out

    def __repr__(self):
        return f"SpherePoint({np.array2string(self.coords, precision=6)}, r={self.radius:g})"


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """An equivalence class [x] = {x, -x} in RP^m(r), stored via its canonical representative."""

    coords: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        r = _check_radius(self.radius)
        x = np.array(self.coords, dtype=float)
        if x.ndim != 1:
            raise ValidationError("coords must be a 1-D vector")
        _check_dim(x.size)
        # flip first, then scale: x and -x give bit-identical representatives
        x = normalize_rows(canonicalize(x, r), r)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "coords", _frozen(x))

    @property
    def m(self) -> int:
        return self.coords.size - 1

    @property
    def rep(self) -> SpherePoint:
        return SpherePoint(self.coords, self.radius)

    def scaled(self, factor: float) -> "ProjectivePoint":
        return ProjectivePoint(self.coords * factor, self.radius * factor)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.radius == other.radius and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.radius, self.coords.tobytes()))

    def __repr__(self):
        return f"ProjectivePoint({np.array2string(self.coords, precision=6)}, r={self.radius:g})"


def quotient(x: SpherePoint) -> ProjectivePoint:
    """The quotient map pi_r: S^m(r) -> RP^m(r)."""
    return ProjectivePoint(x.coords, x.radius)


def _same_space(a, b):
    if a.coords.size != b.coords.size:
        raise ValidationError(f"dimension mismatch: m={a.m} vs m={b.m}")
    if not math.isclose(a.radius, b.radius, rel_tol=1e-12):
        raise ValidationError(f"radius mismatch: {a.radius} vs {b.radius}")
    return a.radius


def dist_chord(x: SpherePoint, y: SpherePoint) -> float:
    _same_space(x, y)
    return float(np.linalg.norm(x.coords - y.coords))


def _geo(cx: np.ndarray, cy: np.ndarray, r: float) -> float:
    # 2 atan2(|x - y|, |x + y|) is the angle; unlike arccos it stays accurate near 0 and pi
    return float(2.0 * r * math.atan2(np.linalg.norm(cx - cy), np.linalg.norm(cx + cy)))


def dist_geo(x: SpherePoint, y: SpherePoint) -> float:
    r = _same_space(x, y)
    return _geo(x.coords, y.coords, r)


def dist_geo_p(a: ProjectivePoint, b: ProjectivePoint) -> float:
    r = _same_space(a, b)
    return min(_geo(a.coords, b.coords, r), _geo(a.coords, -b.coords, r))


def dist_res(a: ProjectivePoint, b: ProjectivePoint) -> float:
    r = _same_space(a, b)
    return float(res_distance(a.coords, b.coords, r))


def res_distance(X: np.ndarray, Y: np.ndarray, r: float) -> np.ndarray:
    """Vectorized residual distance sqrt(1 - (<x,y>/r^2)^2) between rows.

    Evaluated as the length of the component of one unit vector orthogonal to
    the other (averaged over both orders, which keeps it exactly symmetric);
    this keeps full relative accuracy for nearly equal classes, where
    1 - c^2 would cancel.
    """
    U = np.asarray(X, dtype=float) / r
    V = np.asarray(Y, dtype=float) / r
    c = np.sum(U * V, axis=-1, keepdims=True)
    s = 0.5 * (np.linalg.norm(V - c * U, axis=-1) + np.linalg.norm(U - c * V, axis=-1))
    return np.clip(s, 0.0, 1.0)


# --- sphere geometry helpers used by the optimizers and the random walk ---

def tangent_project(y: np.ndarray, v: np.ndarray, r: float) -> np.ndarray:
    """Project ambient vector(s) ``v`` onto the tangent space of S^m(r) at ``y``."""
    return v - (np.sum(v * y, axis=-1, keepdims=True) / (r * r)) * y


def exp_map(y: np.ndarray, v: np.ndarray, r: float) -> np.ndarray:
    """Sphere exponential map of tangent vector(s) ``v`` at ``y`` (arc length = |v|)."""
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    ang = nv / r
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = np.where(nv > 0.0, v / np.where(nv > 0.0, nv, 1.0), 0.0)
    out = np.cos(ang) * y + r * np.sin(ang) * direction
    return normalize_rows(out, r)


def log_map(y: np.ndarray, x: np.ndarray, r: float) -> np.ndarray:
    """Sphere logarithm: tangent vector at ``y`` pointing to ``x`` with length d_geo(y, x)."""
    c = np.clip(np.sum(x * y, axis=-1, keepdims=True) / (r * r), -1.0, 1.0)
    u = x - c * y
    nu = np.linalg.norm(u, axis=-1, keepdims=True)
    theta = np.arctan2(nu / r, c)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(nu > 0.0, u * (r * theta / np.where(nu > 0.0, nu, 1.0)), 0.0)


def random_tangent(y: np.ndarray, r: float, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random unit tangent vector at ``y``."""
    while True:
        v = tangent_project(y, rng.standard_normal(y.shape), r)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            return v / nv


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """A finite weighted law on RP^m(r).

    ``coords`` holds canonical representatives row-wise; expectations of
    class functions are weighted sums over rows.
    """

    coords: np.ndarray
    weights: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        r = _check_radius(self.radius)
        X = np.array(self.coords, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValidationError("a distribution needs a non-empty (n, m+1) point array")
        _check_dim(X.shape[1])
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size != X.shape[0]:
            raise ValidationError(f"{X.shape[0]} points but {w.size} weights")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValidationError("weights must be finite and strictly positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, expected 1")
        X = normalize_rows(canonicalize(X, r), r)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "coords", _frozen(X))
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_points(cls, points: Iterable, weights: Sequence[float] | None = None,
                    radius: float | None = None) -> "EmpiricalDistribution":
        """Build from vectors or ProjectivePoints; weights are renormalized to sum 1."""
        pts = list(points)
        if not pts:
            raise ValidationError("a distribution needs at least one point")
        if radius is None:
            radius = pts[0].radius if isinstance(pts[0], (ProjectivePoint, SpherePoint)) else 1.0
        X = np.array([p.coords if hasattr(p, "coords") else p for p in pts], dtype=float)
        w = np.ones(len(pts)) if weights is None else np.asarray(weights, dtype=float)
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite and strictly positive")
        return cls(X, w / w.sum(), radius)

    @property
    def m(self) -> int:
        return self.coords.shape[1] - 1

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def points(self) -> list[ProjectivePoint]:
        return [ProjectivePoint(x, self.radius) for x in self.coords]

    def rescaled(self, radius: float) -> "EmpiricalDistribution":
        """Same directions, new radius (the map [x] -> (radius/r)[x])."""
        return EmpiricalDistribution(self.coords * (radius / self.radius), self.weights, radius)

    def transformed(self, Q: np.ndarray) -> "EmpiricalDistribution":
        """Apply an orthogonal map to every point."""
        return EmpiricalDistribution(self.coords @ np.asarray(Q).T, self.weights, self.radius)

    def __len__(self):
        return self.n


def point_mass(x, radius: float | None = None) -> EmpiricalDistribution:
    if isinstance(x, (ProjectivePoint, SpherePoint)):
        radius = x.radius if radius is None else radius
        x = x.coords
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if radius is None:
        radius = float(np.linalg.norm(x[0]))
    return EmpiricalDistribution(x, [1.0], radius)


def sample_uniform(m: int, r: float, n: int, seed: int) -> EmpiricalDistribution:
    """n i.i.d. uniform points on RP^m(r) with equal weights (normalized Gaussians)."""
    if int(m) != m or m < 2:
        raise ValidationError(f"m must be an integer >= 2, got {m!r}")
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    _check_radius(r)
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((int(n), int(m) + 1))
    return EmpiricalDistribution(normalize_rows(G, r), np.full(int(n), 1.0 / n), r)
