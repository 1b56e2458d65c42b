"""Geodesic random walk approximation of Brownian motion on S^m(r), quotiented to RP^m(r).

Each step draws a Gaussian tangent vector with variance h = t/steps per
coordinate and follows the sphere geodesic, so the walk has generator
(1/2) Delta in the limit. Every path owns its own RNG stream, seeded by
(seed, path index), which makes the endpoints independent of block size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize

from .errors import UnderSampledError, ValidationError
from .heat_kernel import KernelConfig, rp_kernel_values
from .manifold import EmpiricalDistribution, ProjectivePoint, exp_map, tangent_project
from .special import sphere_area

ORACLE_MAX_H = 0.01
MIN_PATHS = 10_000
MIN_BIN_COUNT = 100
BLOCK = 2048


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    t: float
    seed: int = 0
    n_paths: int = 10_000

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValidationError(f"steps must be a positive integer, got {self.steps!r}")
        if not self.t > 0:
            raise ValidationError(f"t must be positive, got {self.t!r}")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise ValidationError(f"n_paths must be a positive integer, got {self.n_paths!r}")

    @property
    def h(self) -> float:
        return self.t / self.steps


def _noise(seed: int, first: int, count: int, steps: int, dim: int) -> np.ndarray:
    out = np.empty((steps, count, dim))
    for j in range(count):
        rng = np.random.default_rng([seed, first + j])
        out[:, j, :] = rng.standard_normal((steps, dim))
    return out


def walk_paths(start: np.ndarray, r: float, cfg: WalkConfig) -> np.ndarray:
    """Sphere endpoints of ``cfg.n_paths`` walks from the representative ``start``."""
    start = np.asarray(start, dtype=float)
    dim = start.size
    sd = math.sqrt(cfg.h)
    ends = np.empty((cfg.n_paths, dim))
    for first in range(0, cfg.n_paths, BLOCK):
        count = min(BLOCK, cfg.n_paths - first)
        xi = _noise(cfg.seed, first, count, cfg.steps, dim)
        Y = np.broadcast_to(start, (count, dim)).copy()
        for k in range(cfg.steps):
            Y = exp_map(Y, tangent_project(Y, sd * xi[k], r), r)
        ends[first:first + count] = Y
    return ends


def brownian_endpoints(start: ProjectivePoint, cfg: WalkConfig) -> EmpiricalDistribution:
    """Endpoints of the walk started at ``start``, as an equal-weight law on RP^m(r)."""
    ends = walk_paths(start.coords, start.radius, cfg)
    w = np.full(cfg.n_paths, 1.0 / cfg.n_paths)
    return EmpiricalDistribution(ends, w, start.radius)


def zonal_cdf(kcfg: KernelConfig, t: float, a: float) -> float:
    """P(u <= a) for u = <x, X_t>^2 / r^4 under the projective heat kernel."""
    m = kcfg.m
    if a <= 0.0:
        return 0.0
    c = sphere_area(m - 1) * kcfg.r ** m

    def f(z):
        return float(rp_kernel_values(kcfg, z, t).value) * (1.0 - z * z) ** ((m - 2) / 2.0)

    val, _ = integrate.quad(f, 0.0, math.sqrt(min(a, 1.0)), epsabs=1e-13, epsrel=1e-11, limit=200)
    return c * val


def zonal_bins(kcfg: KernelConfig, t: float, bins: int) -> np.ndarray:
    """Edges 0 = a_0 < ... < a_bins = 1 with equal exact probability in each bin."""
    total = zonal_cdf(kcfg, t, 1.0)
    edges = [0.0]
    for k in range(1, bins):
        target = total * k / bins
        edges.append(optimize.brentq(lambda a: zonal_cdf(kcfg, t, a) - target, edges[-1], 1.0,
                                     xtol=1e-14, rtol=1e-12))
    edges.append(1.0)
    return np.array(edges)


@dataclass
class MCReport:
    t: float
    m: int
    radius: float
    bins: int
    n_paths: int
    steps: int
    edges: list
    observed: list
    expected: list
    chi2: float
    max_rel_err: float
    cdf_total: float


def kernel_mc_check(start: ProjectivePoint, t: float, cfg: WalkConfig, bins: int = 10,
                    kernel_cfg: KernelConfig | None = None) -> MCReport:
    """Compare the walk's zonal histogram with the exact law of u = <start, X_t>^2 / r^4.

    Bins have equal exact probability, so every expected count is n_paths / bins.
    """
    r, m = start.radius, start.m
    kcfg = KernelConfig(m, r) if kernel_cfg is None else kernel_cfg
    if kcfg.m != m or not math.isclose(kcfg.r, r, rel_tol=1e-12):
        raise ValidationError("kernel config does not match the start point")
    kcfg.guard(t)
    cfg = replace(cfg, t=t)
    if cfg.h > ORACLE_MAX_H * r * r:
        raise ValidationError(f"step h={cfg.h:g} exceeds {ORACLE_MAX_H}*r^2 for an oracle run")
    if int(bins) != bins or bins < 2:
        raise ValidationError("bins must be an integer >= 2")
    if cfg.n_paths < MIN_PATHS or cfg.n_paths / bins < MIN_BIN_COUNT:
        raise UnderSampledError(
            f"under-sampled: {cfg.n_paths} paths over {bins} bins (need >= {MIN_PATHS} paths "
            f"and >= {MIN_BIN_COUNT} expected per bin)")
    edges = zonal_bins(kcfg, t, bins)
    ends = walk_paths(start.coords, r, cfg)
    u = np.clip((ends @ start.coords / (r * r)) ** 2, 0.0, 1.0)
    obs = np.histogram(u, bins=edges)[0].astype(float)
    exp = np.full(bins, cfg.n_paths / bins)
    chi2 = float(np.sum((obs - exp) ** 2 / exp))
    rel = float(np.max(np.abs(obs - exp) / exp))
    return MCReport(t, m, r, bins, cfg.n_paths, cfg.steps, edges.tolist(), obs.tolist(),
                    exp.tolist(), chi2, rel, zonal_cdf(kcfg, t, 1.0))
