"""Truncated Gegenbauer series for the heat kernel of S^m(r) and RP^m(r).

The generator is (1/2) Laplace-Beltrami, so degree l decays like
exp(-l (l+m-1) t / (2 r^2)). Truncation is certified: the series is cut at
the first degree L whose tail majorant, built from the uniform bound
|coef_l C_l| <= 2^7 (l+m-2)^{m+1}, drops below the absolute tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import RegimeError, SeriesGuardError, TruncationError, ValidationError
from .manifold import ProjectivePoint, SpherePoint
from .special import gegenbauer_table, sphere_area

C_BOUND_CONST = 2.0 ** 7
D_BOUND_CONST = 2.0 ** 14
H_BOUND_CONST = 2.0 ** 21


@dataclass(frozen=True)
class KernelConfig:
    m: int
    r: float = 1.0
    tol: float = 1e-12
    max_terms: int = 500
    t_min: float | None = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValidationError(f"m must be an integer >= 2, got {self.m!r}")
        if not self.r > 0:
            raise ValidationError(f"radius must be positive, got {self.r!r}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol!r}")
        if self.max_terms < 4:
            raise ValidationError("max_terms must be at least 4")
        if self.t_min is None:
            object.__setattr__(self, "t_min", 0.05 * self.r * self.r)
        if not self.t_min > 0:
            raise ValidationError(f"t_min must be positive, got {self.t_min!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "r", float(self.r))

    @property
    def volume_sphere(self) -> float:
        """Volume r^m A_{S^m} of S^m(r)."""
        return self.r ** self.m * sphere_area(self.m)

    def at_radius(self, r: float) -> "KernelConfig":
        """Equivalent configuration on radius ``r``: times scale by k^2, kernel values by k^-m."""
        k = float(r) / self.r
        return KernelConfig(self.m, float(r), self.tol * k ** -self.m, self.max_terms,
                            self.t_min * k * k)

    def unit(self) -> "KernelConfig":
        """Equivalent configuration on radius 1 (time and tolerance rescaled)."""
        return self.at_radius(1.0)

    def guard(self, t: float) -> float:
        if not t >= self.t_min:
            raise SeriesGuardError(
                f"series guard: t={t:g} is below t_min={self.t_min:g}; the spectral series "
                "is not used for such short times")
        return t / (self.r * self.r)


def eigen_rate(l, m):
    """Decay rate l (l+m-1) / 2 of degree l on the unit sphere."""
    return 0.5 * l * (l + m - 1)


def series_coef(l, m):
    return (2.0 * l + m - 1.0) / (m - 1.0)


def _log_majorant(l: int, m: int, tau: float, shift: float) -> float:
    if l + m - 2 <= 0:
        return -math.inf
    return -(eigen_rate(l, m) - shift) * tau + math.log(C_BOUND_CONST) + (m + 1) * math.log(l + m - 2)


def tail_majorant(L: int, m: int, tau: float, step: int = 1, shift: float = 0.0) -> float:
    """Upper bound on sum over l > L (l = L+step, L+2 step, ...) of
    exp(-(rate_l - shift) tau) 2^7 (l+m-2)^{m+1}.

    Terms are summed until their successive ratio q falls below 1/2; the
    remainder is bounded by the geometric series with ratio q (ratios are
    decreasing in l).
    """
    total = 0.0
    l = L + step
    log_a = _log_majorant(l, m, tau, shift)
    for _ in range(100000):
        log_next = _log_majorant(l + step, m, tau, shift)
        q = math.exp(log_next - log_a) if log_a > -math.inf else 0.0
        total += math.exp(log_a)
        if q < 0.5 and eigen_rate(l, m) > shift:
            return total + math.exp(log_next) / (1.0 - q)
        l += step
        log_a = log_next
    return math.inf


@lru_cache(maxsize=4096)
def truncation_degree(m: int, tau: float, tol: float, step: int = 1, start: int = 0,
                      shift: float = 0.0, max_terms: int = 500) -> tuple[int, float]:
    """Smallest L >= start (on the step lattice) whose tail majorant is below ``tol``."""
    L = start
    while L <= max_terms:
        tail = tail_majorant(L, m, tau, step, shift)
        if tail < tol:
            return L, tail
        L += step
    raise TruncationError(
        f"tail bound below {tol:g} not reached within max_terms={max_terms} "
        f"(m={m}, t/r^2={tau:g})")


def zonal_series(z, m: int, tau: float, L: int, step: int = 1, start: int = 0,
                 shift: float = 0.0, derivative: bool = False):
    """sum_{l=start, start+step, ..., L} exp(-(rate_l - shift) tau) coef_l C_l(z)."""
    z = np.asarray(z, dtype=float)
    ls = np.arange(start, L + 1, step)
    w = np.exp(-(eigen_rate(ls, m) - shift) * tau) * series_coef(ls, m)
    w = w.reshape((-1,) + (1,) * z.ndim)
    if derivative:
        C, dC = gegenbauer_table(L, m, z, derivative=True)
        return np.sum(w * C[ls], axis=0), np.sum(w * dC[ls], axis=0)
    C = gegenbauer_table(L, m, z)
    return np.sum(w * C[ls], axis=0)


@dataclass(frozen=True)
class KernelEval:
    value: np.ndarray | float
    terms_used: int
    tail_bound: float


def _evaluate(cfg: KernelConfig, z, t: float, rp: bool) -> KernelEval:
    tau = cfg.guard(t)
    pref = (2.0 if rp else 1.0) / cfg.volume_sphere
    step = 2 if rp else 1
    L, tail = truncation_degree(cfg.m, tau, cfg.tol / pref, step, 0, 0.0, cfg.max_terms)
    z = np.clip(np.asarray(z, dtype=float), -1.0, 1.0)
    val = pref * zonal_series(z, cfg.m, tau, L, step)
    if val.ndim == 0:
        val = float(val)
    return KernelEval(val, len(range(0, L + 1, step)), pref * tail)


def sphere_kernel_values(cfg: KernelConfig, z, t: float) -> KernelEval:
    """Sphere heat kernel as a function of the zonal variable z = <x,y>/r^2."""
    return _evaluate(cfg, z, t, rp=False)


def rp_kernel_values(cfg: KernelConfig, z, t: float) -> KernelEval:
    """Projective heat kernel as a function of z = <x,y>/r^2 (even in z)."""
    return _evaluate(cfg, z, t, rp=True)


def _cos(cfg: KernelConfig, a, b) -> float:
    if a.coords.size != cfg.m + 1 or b.coords.size != cfg.m + 1:
        raise ValidationError(f"points are not in dimension m={cfg.m}")
    if not (math.isclose(a.radius, cfg.r, rel_tol=1e-12) and math.isclose(b.radius, cfg.r, rel_tol=1e-12)):
        raise ValidationError(f"points are not on radius r={cfg.r}")
    return float(np.dot(a.coords, b.coords)) / (cfg.r * cfg.r)


def kernel_sphere(cfg: KernelConfig, x: SpherePoint, y: SpherePoint, t: float) -> float:
    return sphere_kernel_values(cfg, _cos(cfg, x, y), t).value


def kernel_rp(cfg: KernelConfig, a: ProjectivePoint, b: ProjectivePoint, t: float) -> float:
    return rp_kernel_values(cfg, _cos(cfg, a, b), t).value


def kernel_rp_radius_transfer(cfg: KernelConfig, a: ProjectivePoint, b: ProjectivePoint,
                              t: float) -> float:
    """Evaluate through the unit-radius kernel: r^{-m} p_{RP^m}([x/r], [y/r], t/r^2)."""
    cfg.guard(t)
    r = cfg.r
    if r == 1.0:
        return kernel_rp(cfg, a, b, t)
    unit = cfg.unit()
    value = kernel_rp(unit, a.scaled(1.0 / r), b.scaled(1.0 / r), t / (r * r))
    return value / r ** cfg.m


# --- term functions c, d, h and their bounds ---

def _bound(rate: float, const: float, base: int, power: int) -> float:
    # log space: the exponential alone underflows long before the product does
    if base <= 0:
        return 0.0
    return math.exp(-rate + math.log(const) + power * math.log(base))


def c_bound(l: int, m: int, t: float) -> float:
    return _bound(eigen_rate(l, m) * t, C_BOUND_CONST, l + m - 2, m + 1)


def d_bound(n: int, m: int, t: float) -> float:
    return _bound((n * n / 2.0 + n * (m - 1)) * t / 2.0, D_BOUND_CONST, n + m - 2, 2 * m + 3)


def h_bound(k: int, m: int, t: float) -> float:
    return _bound((k * k / 3.0 + k * (m - 1)) * t / 2.0, H_BOUND_CONST, k + m - 2, 3 * m + 5)


@dataclass(frozen=True)
class TermFunctions:
    """The functions c_l, d_n, h_k at effective (unit radius) time ``t``."""

    config: KernelConfig
    t: float

    def __post_init__(self):
        if not self.t >= self.config.t_min / self.config.r ** 2:
            raise SeriesGuardError(f"series guard: effective t={self.t:g} below t_min")

    @property
    def m(self) -> int:
        return self.config.m

    def c_coeffs(self, K: int, cosang) -> np.ndarray:
        """c_0 .. c_K at ``cosang`` (first axis = index); zero for l = 0 and odd l."""
        z = np.asarray(cosang, dtype=float)
        out = np.zeros((K + 1,) + z.shape)
        if K >= 2:
            C = gegenbauer_table(K, self.m, z)
            ls = np.arange(2, K + 1, 2)
            w = np.exp(-eigen_rate(ls, self.m) * self.t) * series_coef(ls, self.m)
            out[ls] = w.reshape((-1,) + (1,) * z.ndim) * C[ls]
        return out

    def d_coeffs(self, N: int, cosang) -> np.ndarray:
        c = self.c_coeffs(N, cosang)
        return np.array([np.sum(c[: n + 1] * c[n::-1], axis=0) for n in range(N + 1)])

    def h_coeffs(self, K: int, cosang) -> np.ndarray:
        c = self.c_coeffs(K, cosang)
        d = self.d_coeffs(K, cosang)
        return np.array([np.sum(d[: k + 1] * c[k::-1], axis=0) for k in range(K + 1)])


def term_c(tf: TermFunctions, l: int, cosang):
    return tf.c_coeffs(l, cosang)[l]


def term_d(tf: TermFunctions, n: int, cosang):
    return tf.d_coeffs(n, cosang)[n]


def term_h(tf: TermFunctions, k: int, cosang):
    return tf.h_coeffs(k, cosang)[k]


@dataclass
class TaylorReport:
    t: float
    cosang: float
    L: int
    sum_c: float
    lhs: float
    rhs2: float
    remainder: float
    sum_h: float
    hbound: float
    ratio: float
    C: float
    passed: bool = field(default=False)


def taylor_remainder_check(tf: TermFunctions, cosang: float, L: int | None = None,
                           C: float = 2.0) -> TaylorReport:
    """Compare ln(1 + S) with S - D/2 and measure the remainder against C |sum h|.

    S = sum_{l<=L} c_l, D = sum_{n<=2L} d_n and sum h runs over 6 <= k <= 3L,
    so the truncated Cauchy products are exact and the remainder isolates the
    third-order Taylor term. Evaluated in extended precision because the
    remainder is of size |S|^3.
    """
    import mpmath

    if L is None:
        L, _ = truncation_degree(tf.m, tf.t, 1e-30, 2, 2, 0.0, tf.config.max_terms)
    c = [float(v) for v in tf.c_coeffs(L, float(cosang))]
    S = math.fsum(c)
    if abs(S) >= 0.5:
        raise RegimeError(f"expansion regime not reached: |sum c| = {abs(S):.3g} >= 0.5")
    digits = 30 + (int(-3 * math.log10(abs(S))) if S != 0.0 else 0)
    with mpmath.workdps(max(30, min(digits, 5000))):
        cm = [mpmath.mpf(v) for v in c] + [mpmath.mpf(0)] * (2 * L)
        d = [mpmath.fsum(cm[i] * cm[n - i] for i in range(n + 1)) for n in range(2 * L + 1)]
        d += [mpmath.mpf(0)] * L
        h = [mpmath.fsum(d[n] * cm[k - n] for n in range(k + 1)) for k in range(3 * L + 1)]
        Sm = mpmath.fsum(cm)
        lhs = mpmath.log1p(Sm)
        rhs2 = Sm - mpmath.fsum(d[4:]) / 2
        rem = lhs - rhs2
        sum_h = mpmath.fsum(h[6:])
        hbound = C * abs(sum_h)
        ratio = abs(rem) / abs(sum_h) if sum_h != 0 else mpmath.mpf(0)
        passed = bool(abs(rem) <= hbound)
        return TaylorReport(tf.t, float(cosang), L, S, float(lhs), float(rhs2), float(rem),
                            float(sum_h), float(hbound), float(ratio), C, passed)


# --- quadrature oracles ---

def zonal_integral(f, m: int, r: float = 1.0, nodes: int = 400) -> float:
    """Integral over S^m(r) of y -> f(<x,y>/r^2), by Gauss-Legendre in the polar angle."""
    u, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * (u + 1.0)
    vals = np.asarray(f(np.cos(theta))) * np.sin(theta) ** (m - 1)
    return sphere_area(m - 1) * r ** m * 0.5 * math.pi * float(np.dot(w, vals))


def normalization_error(cfg: KernelConfig, t: float, space: str = "rp", nodes: int = 400) -> float:
    """|integral of p(x, ., t) - 1| over the space, by zonal quadrature."""
    if space == "sphere":
        total = zonal_integral(lambda z: sphere_kernel_values(cfg, z, t).value, cfg.m, cfg.r, nodes)
    elif space == "rp":
        # RP^m(r) carries half the sphere volume; p_RP is even in z
        total = 0.5 * zonal_integral(lambda z: rp_kernel_values(cfg, z, t).value, cfg.m, cfg.r, nodes)
    else:
        raise ValidationError(f"unknown space {space!r}")
    return abs(total - 1.0)


def folddown_error(cfg: KernelConfig, z, t: float) -> np.ndarray:
    """|p_RP(z) - (p_S(z) + p_S(-z))| pointwise."""
    z = np.asarray(z, dtype=float)
    rp = rp_kernel_values(cfg, z, t).value
    fold = sphere_kernel_values(cfg, z, t).value + sphere_kernel_values(cfg, -z, t).value
    return np.abs(rp - fold)
