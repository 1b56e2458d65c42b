"""Multistart Riemannian gradient descent on S^m(r) with Armijo backtracking.

Objectives are even functions of y (they live on RP^m(r)), so runs work with
sphere representatives and results are canonicalized and deduplicated in the
residual metric.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .manifold import canonicalize, exp_map, normalize_rows, res_distance

ARMIJO_C = 1e-4
MAX_BACKTRACK = 60
FLAT_RTOL = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class OptimizerSettings:
    n_random: int = 8
    g_tol: float = 1e-10
    stall_g_tol: float = 1e-6
    max_iter: int = 5000
    set_tol: float = 1e-8
    cluster_radius: float = 1e-4
    max_support_starts: int = 64
    seed: int = 0
    threads: int = 1


@dataclass
class RunResult:
    y: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    start_index: int


def descend(fun: Callable, y0: np.ndarray, r: float, settings: OptimizerSettings,
            start_index: int = 0) -> RunResult:
    """Minimize ``fun`` from ``y0``; ``fun(y)`` returns (value, Riemannian gradient).

    Convergence is declared when the angular gradient r |grad| is below
    ``g_tol``. If the line search stalls (no decrease representable in double
    precision) the run stops and counts as converged when r |grad| is below
    ``stall_g_tol``. When the Armijo decrease is below the roundoff of f,
    a trial step is accepted instead if f stays level and |grad| shrinks.
    """
    y = normalize_rows(np.asarray(y0, dtype=float), r)
    f, g = fun(y)
    gn = float(np.linalg.norm(g))
    step = None
    it = 0
    while it < settings.max_iter and r * gn > settings.g_tol:
        it += 1
        if step is None:
            step = 0.1 * r / gn
        else:
            step *= 2.0
        step = min(step, 0.5 * r / gn)
        accepted = False
        for _ in range(MAX_BACKTRACK):
            y_new = exp_map(y, -step * g, r)
            f_new, g_new = fun(y_new)
            noise = FLAT_RTOL * max(1.0, abs(f))
            if step * gn * gn > noise:
                ok = f_new <= f - ARMIJO_C * step * gn * gn
            else:
                # value differences are roundoff: require a level value and a smaller |grad|
                ok = f_new <= f + noise and np.linalg.norm(g_new) < (1.0 - ARMIJO_C) * gn
            if ok:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return RunResult(y, f, gn, it, r * gn <= settings.stall_g_tol, start_index)
        y, f, g = y_new, f_new, g_new
        gn = float(np.linalg.norm(g))
    converged = r * gn <= settings.g_tol or r * gn <= settings.stall_g_tol and it < settings.max_iter
    return RunResult(y, f, gn, it, bool(converged), start_index)


def multistart(fun: Callable, starts: np.ndarray, r: float,
               settings: OptimizerSettings) -> list[RunResult]:
    """Run ``descend`` from every start; results come back in start order."""
    starts = np.atleast_2d(starts)

    def run(i):
        return descend(fun, starts[i], r, settings, start_index=i)

    if settings.threads > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            results = list(pool.map(run, range(starts.shape[0])))
    else:
        results = [run(i) for i in range(starts.shape[0])]
    for res in results:
        res.y = canonicalize(res.y, r)
    return results


def sort_key(res: RunResult):
    return (res.value, tuple(res.y))


def cluster(results: list[RunResult], r: float, radius: float) -> list[RunResult]:
    """Deduplicate results in the residual metric, keeping the best of each cluster."""
    reps: list[RunResult] = []
    for res in sorted(results, key=sort_key):
        if all(res_distance(res.y, k.y, r) > radius for k in reps):
            reps.append(res)
    return reps


def support_starts(coords: np.ndarray, weights: np.ndarray, limit: int) -> np.ndarray:
    """Support points, the ``limit`` heaviest if there are more (ties broken by index)."""
    if coords.shape[0] <= limit:
        return coords
    order = np.lexsort((np.arange(weights.size), -weights))[:limit]
    return coords[np.sort(order)]
