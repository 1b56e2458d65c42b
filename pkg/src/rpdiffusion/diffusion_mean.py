"""Diffusion t-means on RP^m(r): minimizers of L_t(y) = E[-ln p(X, y, t)].

Long diffusion times make L_t nearly constant: its variation across the space
is of order exp(-(m+1) t / r^2). The estimator therefore works with the
rescaled excess

    F(y) = (L_t(y) - L_inf) / eps,   eps = exp(-(m+1) t / r^2),

where L_inf = -ln(2 / (r^m A_{S^m})). F has the same minimizers as L_t and is
O(1) for every t, so the optimizer sees a well-scaled problem instead of a
function that is flat to machine precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .eigen import second_moment
from .errors import ConvergenceError, NumericalError, ValidationError
from .heat_kernel import KernelConfig, rp_kernel_values, truncation_degree, zonal_series
from .manifold import (EmpiricalDistribution, ProjectivePoint, log_map, normalize_rows,
                       sample_uniform, tangent_project)
from .optim import OptimizerSettings, cluster, multistart, support_starts


@dataclass
class MeanEstimate:
    minimizers: list
    objective: float
    near_optimal: list
    t: float
    radius: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def best(self) -> ProjectivePoint:
        return self.minimizers[0]


def _check_cfg(dist: EmpiricalDistribution, cfg: KernelConfig):
    if cfg.m != dist.m:
        raise ValidationError(f"kernel config has m={cfg.m} but data has m={dist.m}")
    if not math.isclose(cfg.r, dist.radius, rel_tol=1e-12):
        raise ValidationError(f"kernel config has r={cfg.r} but data has r={dist.radius}")


def _log1p_over(eps: float, s: np.ndarray) -> np.ndarray:
    """log1p(eps * s) / eps, stable for tiny (or underflowed) eps."""
    x = eps * s
    small = np.abs(x) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.log1p(x) / eps if eps > 0.0 else s
    return np.where(small, s * (1.0 - x / 2.0 + x * x / 3.0), big)


class ExcessObjective:
    """Rescaled excess log-likelihood F and its Riemannian gradient for a fixed (dist, t)."""

    def __init__(self, dist: EmpiricalDistribution, t: float, cfg: KernelConfig):
        _check_cfg(dist, cfg)
        self.tau = cfg.guard(t)
        self.dist, self.cfg, self.t = dist, cfg, t
        self.m, self.r = dist.m, dist.radius
        self.shift = self.m + 1.0
        self.eps = math.exp(-self.shift * self.tau)
        self.L, self.tail = truncation_degree(self.m, self.tau, cfg.tol, 2, 2, self.shift,
                                              cfg.max_terms)
        self.l_inf = -math.log(2.0 / cfg.volume_sphere)

    def _series(self, y, derivative):
        z = np.clip(self.dist.coords @ y / (self.r * self.r), -1.0, 1.0)
        return z, zonal_series(z, self.m, self.tau, self.L, 2, 2, self.shift, derivative)

    def value(self, y: np.ndarray) -> float:
        _, s = self._series(y, False)
        if np.any(1.0 + self.eps * s <= 0.0):
            raise NumericalError("nonpositive kernel value; evaluation refused")
        return float(-np.dot(self.dist.weights, _log1p_over(self.eps, s)))

    def __call__(self, y: np.ndarray):
        _, (s, ds) = self._series(y, True)
        denom = 1.0 + self.eps * s
        if np.any(denom <= 0.0):
            raise NumericalError("nonpositive kernel value; evaluation refused")
        f = float(-np.dot(self.dist.weights, _log1p_over(self.eps, s)))
        coef = -(self.dist.weights * ds / denom) / (self.r * self.r)
        g = tangent_project(y, coef @ self.dist.coords, self.r)
        return f, g

    def full(self, f_scaled: float) -> float:
        return self.l_inf + self.eps * f_scaled


def log_likelihood(dist: EmpiricalDistribution, y: ProjectivePoint, t: float,
                   cfg: KernelConfig) -> float:
    """L_t(y) = sum_i w_i (-ln p_RP(x_i, y, t))."""
    obj = ExcessObjective(dist, t, cfg)
    return obj.full(obj.value(np.asarray(y.coords)))


def log_likelihood_direct(dist: EmpiricalDistribution, y: ProjectivePoint, t: float,
                          cfg: KernelConfig) -> float:
    """Same quantity straight from kernel values; loses accuracy once L_t is flat."""
    _check_cfg(dist, cfg)
    z = dist.coords @ y.coords / (cfg.r * cfg.r)
    p = rp_kernel_values(cfg, z, t).value
    if np.any(p <= 0.0):
        raise NumericalError("nonpositive kernel value; evaluation refused")
    return float(-np.dot(dist.weights, np.log(p)))


def log_likelihood_grad(dist: EmpiricalDistribution, y: ProjectivePoint, t: float,
                        cfg: KernelConfig) -> np.ndarray:
    """Riemannian gradient of L_t at the representative ``y.coords`` (ambient coordinates)."""
    obj = ExcessObjective(dist, t, cfg)
    return obj.eps * obj(np.asarray(y.coords))[1]


def _random_starts(m, r, n, seed):
    if n <= 0:
        return np.empty((0, m + 1))
    return sample_uniform(m, r, n, seed).coords


def _estimate(runs, r, opt, t, full, extra):
    good = [res for res in runs if res.converged]
    if not good:
        raise ConvergenceError("no optimizer run converged")
    reps = cluster(good, r, opt.cluster_radius)
    best = reps[0].value
    scale = max(1.0, abs(best))
    within = [res for res in reps if res.value <= best + opt.set_tol * scale]
    pts = [ProjectivePoint(res.y, r) for res in within]
    diagnostics = {
        "restarts": len(runs),
        "converged_runs": len(good),
        "iterations": int(sum(res.iterations for res in runs)),
        "grad_norm": float(reps[0].grad_norm),
        "best_start": int(reps[0].start_index),
        "local_optima": [{"point": res.y.tolist(), "objective": full(res.value)} for res in reps],
    }
    diagnostics.update(extra)
    return MeanEstimate(pts, full(best), list(pts), t, r, diagnostics)


def estimate_mean_set(dist: EmpiricalDistribution, t: float, cfg: KernelConfig,
                      opt: OptimizerSettings = OptimizerSettings()) -> MeanEstimate:
    """Multistart estimate of the diffusion t-mean set E_t(X).

    Starts: the support points (capped at ``opt.max_support_starts``), the
    top-eigenspace basis of E[XX^T], and ``opt.n_random`` uniform points drawn
    from ``opt.seed``. Clusters within ``set_tol`` (relative, in the rescaled
    objective) of the best value are reported as minimizers.
    """
    obj = ExcessObjective(dist, t, cfg)
    r = dist.radius
    sm = second_moment(dist)
    starts = np.vstack([
        support_starts(dist.coords, dist.weights, opt.max_support_starts),
        (r * sm.top_eigenspace).T,
        _random_starts(dist.m, r, opt.n_random, opt.seed),
    ])
    runs = multistart(obj, starts, r, opt)
    est = _estimate(runs, r, opt, t, obj.full, {"excess_scale": obj.eps, "series_degree": obj.L})
    est.diagnostics["excess_scaled"] = min(res.value for res in runs if res.converged)
    return est


def rescale_mean_set(est: MeanEstimate, r_from: float, r_to: float) -> MeanEstimate:
    """Transport an estimate between radii: points scale by k = r_to/r_from, time by k^2.

    The objective shifts by m ln k, since p_{RP(kr)}(kx, ky, k^2 t) = k^{-m} p_{RP(r)}(x, y, t).
    """
    if not (r_from > 0 and r_to > 0):
        raise ValidationError("radii must be positive")
    k = r_to / r_from
    pts = [p.scaled(k) for p in est.minimizers]
    near = [p.scaled(k) for p in est.near_optimal]
    m = pts[0].m
    diagnostics = dict(est.diagnostics)
    return replace(est, minimizers=pts, near_optimal=near, t=est.t * k * k,
                   radius=est.radius * k, objective=est.objective + m * math.log(k),
                   diagnostics=diagnostics)


class IntrinsicObjective:
    """E[d_geo-p(X, y)^2] and its gradient -2 E[log_y(s X)], s = sign <X, y>."""

    def __init__(self, dist: EmpiricalDistribution):
        self.dist, self.r = dist, dist.radius

    def __call__(self, y):
        X = self.dist.coords
        s = np.where(X @ y < 0.0, -1.0, 1.0)
        V = log_map(y, X * s[:, None], self.r)
        d2 = np.sum(V * V, axis=1)
        f = float(np.dot(self.dist.weights, d2))
        g = -2.0 * (self.dist.weights @ V)
        return f, tangent_project(y, g, self.r)


def intrinsic_objective(dist: EmpiricalDistribution, y: ProjectivePoint) -> float:
    return IntrinsicObjective(dist)(np.asarray(y.coords))[0]


def intrinsic_mean(dist: EmpiricalDistribution,
                   opt: OptimizerSettings = OptimizerSettings()) -> MeanEstimate:
    """Multistart minimizer of E[d_geo-p(X, y)^2] (the intrinsic / Frechet mean set).

    At cut-locus configurations (<x, y> = 0) the representative sign is taken
    as +1, a deterministic subgradient choice.
    """
    r = dist.radius
    obj = IntrinsicObjective(dist)
    starts = np.vstack([support_starts(dist.coords, dist.weights, opt.max_support_starts),
                        _random_starts(dist.m, r, opt.n_random, opt.seed)])
    # the objective is O(r^2); tolerances are angular, set_tol is relative
    runs = multistart(obj, normalize_rows(starts, r), r, opt)
    return _estimate(runs, r, opt, float("nan"), lambda v: v, {})
