"""Gegenbauer polynomials C_l^{(m-1)/2}, their explicit bounds, and sphere areas."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class GegenbauerParams:
    """Degree ``l`` and ambient dimension ``m``; the order is alpha = (m-1)/2."""

    l: int
    m: int

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise ValidationError(f"degree l must be a nonnegative integer, got {self.l!r}")
        if int(self.m) != self.m or self.m < 2:
            raise ValidationError(f"m must be an integer >= 2, got {self.m!r}")
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "m", int(self.m))

    @property
    def alpha(self) -> float:
        return 0.5 * (self.m - 1)


def _clamp(z, warn: bool = True):
    z = np.asarray(z, dtype=float)
    excess = np.max(np.abs(z)) - 1.0 if z.size else 0.0
    if excess > CLAMP_TOL:
        raise ValidationError(f"Gegenbauer argument outside [-1, 1] by {excess:.3g}")
    if excess > 0.0:
        if warn:
            warnings.warn(f"clamping Gegenbauer argument exceeding [-1, 1] by {excess:.3g}",
                          RuntimeWarning, stacklevel=3)
        z = np.clip(z, -1.0, 1.0)
    return z


def _table(L: int, alpha: float, z: np.ndarray) -> np.ndarray:
    """Rows C_0^alpha(z), ..., C_L^alpha(z) by the three-term recurrence."""
    out = np.empty((L + 1,) + z.shape)
    out[0] = 1.0
    if L >= 1:
        out[1] = 2.0 * alpha * z
    for l in range(2, L + 1):
        out[l] = (2.0 * (l + alpha - 1.0) * z * out[l - 1] - (l + 2.0 * alpha - 2.0) * out[l - 2]) / l
    return out


def gegenbauer_table(L: int, m: int, z, derivative: bool = False):
    """All degrees 0..L of C_l^{(m-1)/2} at ``z`` (first axis = degree).

    With ``derivative=True`` also returns d/dz, using dC_l^a/dz = 2a C_{l-1}^{a+1}.
    Arguments are clipped to [-1, 1] silently; callers are expected to have
    clamped inner products already.
    """
    z = np.clip(np.asarray(z, dtype=float), -1.0, 1.0)
    alpha = 0.5 * (m - 1)
    C = _table(L, alpha, z)
    if not derivative:
        return C
    dC = np.zeros_like(C)
    if L >= 1:
        dC[1:] = 2.0 * alpha * _table(L - 1, alpha + 1.0, z)
    return C, dC


def gegenbauer(l: int, m: int, z):
    """C_l^{(m-1)/2}(z), seeded by C_0 = 1 and C_1 = (m-1) z."""
    p = GegenbauerParams(l, m)
    z = _clamp(z)
    val = _table(p.l, p.alpha, z)[p.l]
    return float(val) if val.ndim == 0 else val


def gegenbauer_parity(l: int, m: int, z):
    """The pair (C_l(z), C_l(-z)); the second equals (-1)^l times the first."""
    z = _clamp(z)
    return gegenbauer(l, m, z), gegenbauer(l, m, -z)


def gamma_half_integer(k: float) -> float:
    """Gamma(k) = sqrt(pi) * prod_{i=1}^{floor k} (k - i) for k in {1.5, 2.5, ...}."""
    k = float(k)
    if k < 1.5 or (k - 0.5) != int(k - 0.5):
        raise ValidationError(f"k must be a half-integer >= 1.5, got {k!r}")
    out = math.sqrt(math.pi)
    for i in range(1, math.floor(k) + 1):
        out *= k - i
    return out


def gamma_sandwich(k: float) -> tuple[float, float]:
    """Lower and upper factorial bounds (1/4)(floor(k)-1)! and 2(ceil(k)-1)! on Gamma(k)."""
    return 0.25 * math.factorial(math.floor(k) - 1), 2.0 * math.factorial(math.ceil(k) - 1)


def gegenbauer_bound(l: int, m: int) -> float:
    """Uniform bound of |C_l^{(m-1)/2}| on [-1, 1]: 1 for l = 0, else 2^5 (l+m-2)^m."""
    p = GegenbauerParams(l, m)
    if p.l == 0:
        return 1.0
    return 32.0 * float(p.l + p.m - 2) ** p.m


def sphere_area(m: int) -> float:
    """Surface area of the unit m-sphere, 2 pi^{(m+1)/2} / Gamma((m+1)/2)."""
    if int(m) != m or m < 1:
        raise ValidationError(f"sphere dimension must be an integer >= 1, got {m!r}")
    return 2.0 * math.pi ** (0.5 * (m + 1)) / math.gamma(0.5 * (m + 1))


def bound_check(ms=range(2, 11), ls=range(0, 51), step: float = 1e-3) -> dict:
    """Grid check of |C_l| <= bound; returns violation count and the worst ratio."""
    n = int(round(2.0 / step)) + 1
    z = np.linspace(-1.0, 1.0, n)
    ls = list(ls)
    worst, violations, worst_at = 0.0, 0, None
    for m in ms:
        C = gegenbauer_table(max(ls), m, z)
        for l in ls:
            ratio = float(np.max(np.abs(C[l]))) / gegenbauer_bound(l, m)
            violations += int(ratio > 1.0)
            if ratio > worst:
                worst, worst_at = ratio, (l, m)
    return {"violations": violations, "max_ratio": worst, "max_ratio_at": worst_at,
            "grid_points": n}
