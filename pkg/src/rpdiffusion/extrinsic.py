"""The isometric quadratic embedding of RP^m(r_m) into the unit sphere of R^{m(m+3)/2}.

F_m is the recursively defined symmetric bilinear map; Phi([x]) = (1/2)
sqrt(m / (2(m+1))) F_m(x, x) lands on the unit sphere when |x| = r_m =
sqrt(2(m+1)/m). Extrinsic means are computed in that embedding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ValidationError
from .manifold import (EmpiricalDistribution, ProjectivePoint, exp_map, normalize_rows,
                       random_tangent, res_distance, sample_uniform, tangent_project)
from .optim import OptimizerSettings, cluster, multistart, support_starts

RADIUS_TOL = 1e-10


def special_radius(m: int) -> float:
    """r_m = sqrt(2(m+1)/m), the radius at which Phi is an isometry onto a unit sphere."""
    return math.sqrt(2.0 * (m + 1) / m)


def embedding_dim(m: int) -> int:
    return m * (m + 3) // 2


def tau(k: int) -> float:
    return math.sqrt(2.0 / (k * (k + 1)))


def f_map(m: int, x, y) -> np.ndarray:
    """F_m(x, y) for x, y in R^{m+1}; leading axes broadcast.

    Layout follows the recursion: the F_{k-1} block, then x_{k+1} y' + y_{k+1} x',
    then tau_k (<x', y'> - k x_{k+1} y_{k+1}), for k = 2, ..., m.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if int(m) != m or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}")
    if x.shape[-1] != m + 1 or y.shape[-1] != m + 1:
        raise ValidationError(f"F_{m} needs vectors of length {m + 1}")
    x, y = np.broadcast_arrays(x, y)
    parts = [(x[..., 0] * y[..., 0] - x[..., 1] * y[..., 1])[..., None],
             (x[..., 0] * y[..., 1] + x[..., 1] * y[..., 0])[..., None]]
    for k in range(2, m + 1):
        xp, yp = x[..., :k], y[..., :k]
        xn, yn = x[..., k:k + 1], y[..., k:k + 1]
        parts.append(xn * yp + yn * xp)
        inner = np.sum(xp * yp, axis=-1, keepdims=True)
        parts.append(tau(k) * (inner - k * (xn * yn)))
    return np.concatenate(parts, axis=-1)


def _phi_const(m: int) -> float:
    return 0.5 * math.sqrt(m / (2.0 * (m + 1)))


def phi_tilde(x) -> np.ndarray:
    """Phi extended to all of R^{m+1}; homogeneous of degree 2."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-1] - 1
    return _phi_const(m) * f_map(m, x, x)


@dataclass(frozen=True, eq=False)
class EmbeddingImage:
    coords: np.ndarray
    source_m: int
    source_r: float


def embed(a: ProjectivePoint) -> EmbeddingImage:
    """Phi([x]) for [x] in RP^m(r_m)."""
    m = a.m
    if abs(a.radius - special_radius(m)) > RADIUS_TOL:
        raise ValidationError(
            f"embed needs radius r_m={special_radius(m):.15g} for m={m}, got {a.radius!r}")
    return EmbeddingImage(phi_tilde(a.coords), m, a.radius)


def embed_radius(a: ProjectivePoint) -> EmbeddingImage:
    """Phi_r = (r_m / r) Phi_tilde on RP^m(r); image norm r / r_m."""
    m = a.m
    return EmbeddingImage(special_radius(m) / a.radius * phi_tilde(a.coords), m, a.radius)


def embed_array(X: np.ndarray, r: float) -> np.ndarray:
    """Phi_r of every row of ``X`` (points on S^m(r))."""
    X = np.asarray(X, dtype=float)
    return special_radius(X.shape[-1] - 1) / r * phi_tilde(X)


def chordal_identity_rhs(inner, m: int):
    return -(m / (2.0 * (m + 1))) * np.asarray(inner) ** 2 + 2.0 * (m + 1) / m


@dataclass
class IdentityReport:
    lhs: float
    rhs: float
    abs_err: float
    passed: bool


def chordal_identity_check(a: ProjectivePoint, b: ProjectivePoint) -> IdentityReport:
    """Compare |Phi[x] - Phi[y]|^2 with -(m/(2(m+1))) <x,y>^2 + 2(m+1)/m."""
    if a.m != b.m:
        raise ValidationError("dimension mismatch")
    diff = embed(a).coords - embed(b).coords
    lhs = float(np.dot(diff, diff))
    rhs = float(chordal_identity_rhs(np.dot(a.coords, b.coords), a.m))
    err = abs(lhs - rhs)
    return IdentityReport(lhs, rhs, err, err <= 1e-12 * (1.0 + abs(rhs)))


def chordal_identity_errors(m: int, pairs: int, seed: int = 0) -> np.ndarray:
    """Absolute identity errors on ``pairs`` random pairs in RP^m(r_m)."""
    rng = np.random.default_rng(seed)
    r = special_radius(m)
    X = normalize_rows(rng.standard_normal((pairs, m + 1)), r)
    Y = normalize_rows(rng.standard_normal((pairs, m + 1)), r)
    D = phi_tilde(X) - phi_tilde(Y)
    lhs = np.sum(D * D, axis=1)
    return np.abs(lhs - chordal_identity_rhs(np.sum(X * Y, axis=1), m))


def isometry_errors(m: int, pairs: int, s: float = 1e-4, seed: int = 0,
                    r: float | None = None) -> np.ndarray:
    """Relative error of the finite-difference speed |Phi_r(exp_x(s u)) - Phi_r(x)| / s
    against |u| = 1, for random points x and unit tangents u."""
    rng = np.random.default_rng(seed)
    r = special_radius(m) if r is None else r
    X = normalize_rows(rng.standard_normal((pairs, m + 1)), r)
    U = np.array([random_tangent(x, r, rng) for x in X])
    Y = exp_map(X, s * U, r)
    speed = np.linalg.norm(embed_array(Y, r) - embed_array(X, r), axis=1) / s
    return np.abs(speed - 1.0)


@dataclass
class ExtrinsicMean:
    point: ProjectivePoint | None
    status: str
    embedded_mean_norm: float
    projection_distance: float | None = None
    diagnostics: dict = field(default_factory=dict)


class _InnerWithTarget:
    """Minimize -<Phi(y), mu> over the sphere of radius r_m."""

    def __init__(self, mu: np.ndarray, m: int):
        self.mu, self.m, self.r = mu, m, special_radius(m)
        self.eye = np.eye(m + 1)
        self.k = _phi_const(m)

    def __call__(self, y):
        f = -float(np.dot(phi_tilde(y), self.mu))
        # d/dy F(y, y) = 2 F(y, e_i) column-wise
        J = f_map(self.m, np.broadcast_to(y, self.eye.shape), self.eye)
        g = -2.0 * self.k * (J @ self.mu)
        return f, tangent_project(y, g, self.r)


def extrinsic_mean(dist: EmpiricalDistribution, opt: OptimizerSettings = OptimizerSettings(),
                   degeneracy_tol: float = 1e-10, proj_tol: float = 1e-8) -> ExtrinsicMean:
    """Extrinsic mean of a law on RP^m(r_m) with respect to Phi.

    The normalized Euclidean mean mu = E[Phi(X)] / |E[Phi(X)]| is pulled back
    by maximizing <Phi([y]), mu> over RP^m(r_m) (multistart Riemannian
    ascent). Status is ``on_manifold`` when Phi([y*]) reproduces mu within
    ``proj_tol``, ``projected`` otherwise, and ``degenerate`` when
    |E[Phi(X)]| <= ``degeneracy_tol`` (no point is returned then).
    """
    m, r = dist.m, dist.radius
    if abs(r - special_radius(m)) > RADIUS_TOL:
        raise ValidationError(
            f"extrinsic_mean needs data at radius r_m={special_radius(m):.15g}, got {r!r}")
    E = dist.weights @ phi_tilde(dist.coords)
    norm = float(np.linalg.norm(E))
    if norm <= degeneracy_tol:
        return ExtrinsicMean(None, "degenerate", norm)
    mu = E / norm
    obj = _InnerWithTarget(mu, m)
    starts = np.vstack([support_starts(dist.coords, dist.weights, opt.max_support_starts),
                        sample_uniform(m, r, opt.n_random, opt.seed + 1).coords
                        if opt.n_random > 0 else np.empty((0, m + 1))])
    runs = multistart(obj, starts, r, opt)
    good = [res for res in runs if res.converged]
    if not good:
        raise ConvergenceError("pull-back of the embedded mean did not converge")
    reps = cluster(good, r, opt.cluster_radius)
    best = reps[0]
    point = ProjectivePoint(best.y, r)
    dist_to_mu = float(np.linalg.norm(phi_tilde(best.y) - mu))
    status = "on_manifold" if dist_to_mu <= proj_tol else "projected"
    diagnostics = {"restarts": len(runs), "converged_runs": len(good),
                   "grad_norm": float(best.grad_norm), "inner_product": -best.value,
                   "distinct_optima": len(reps)}
    return ExtrinsicMean(point, status, norm, dist_to_mu, diagnostics)


def extrinsic_mean_rescaled(dist: EmpiricalDistribution,
                            opt: OptimizerSettings = OptimizerSettings(), **kw) -> ExtrinsicMean:
    """Extrinsic mean for data at any radius: rescale to r_m, compute, scale back."""
    rm = special_radius(dist.m)
    res = extrinsic_mean(dist.rescaled(rm), opt, **kw)
    if res.point is not None:
        res.point = res.point.scaled(dist.radius / rm)
    return res


def residual_to(point: ProjectivePoint, other: ProjectivePoint) -> float:
    """Residual distance between classes that may live at different radii."""
    a = point.coords / point.radius
    b = other.coords / other.radius
    return float(res_distance(a, b, 1.0))
