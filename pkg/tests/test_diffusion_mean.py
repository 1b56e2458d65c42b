import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize
from scipy.stats import special_ortho_group

from rpdiffusion.diffusion_mean import (ExcessObjective, estimate_mean_set, intrinsic_mean,
                                        intrinsic_objective, log_likelihood, log_likelihood_direct,
                                        rescale_mean_set)
from rpdiffusion.eigen import second_moment
from rpdiffusion.errors import SeriesGuardError, ValidationError
from rpdiffusion.heat_kernel import KernelConfig
from rpdiffusion.manifold import (EmpiricalDistribution, ProjectivePoint, dist_res, normalize_rows,
                                  point_mass, sample_uniform)
from rpdiffusion.optim import OptimizerSettings
from rpdiffusion.special import sphere_area

OPT = OptimizerSettings(n_random=4, seed=1)


def _law(rng, n, m, r=1.0):
    X = normalize_rows(rng.standard_normal((n, m + 1)), r)
    return EmpiricalDistribution(X, rng.dirichlet(np.ones(n)), r)


def test_point_mass_uniform_limit():
    for r in (1.0, 2.0):
        dist = point_mass([0.0, 0.0, r])
        val = log_likelihood(dist, dist.points[0], 60.0 * r * r, KernelConfig(2, r))
        assert val == pytest.approx(-math.log(2 / (r ** 2 * sphere_area(2))), abs=1e-8)


def test_flat_at_large_t():
    dist = EmpiricalDistribution.from_points([[1, 0, 0], [0.6, 0.8, 0], [0, 0.6, 0.8]],
                                             [0.5, 0.3, 0.2], 1.0)
    cfg = KernelConfig(2, 1.0)
    grid = [ProjectivePoint(v) for v in np.random.default_rng(0).standard_normal((200, 3))]
    vals = [log_likelihood(dist, y, 50.0, cfg) for y in grid]
    assert max(vals) - min(vals) < 1e-6


def test_sign_invariance(rng):
    dist = _law(rng, 5, 3)
    cfg = KernelConfig(3, 1.0)
    y = rng.standard_normal(4)
    a = log_likelihood(dist, ProjectivePoint(y), 0.7, cfg)
    assert a == log_likelihood(dist, ProjectivePoint(-y), 0.7, cfg)
    flipped = EmpiricalDistribution(-dist.coords, dist.weights, 1.0)
    assert a == log_likelihood(flipped, ProjectivePoint(y), 0.7, cfg)


@pytest.mark.parametrize("t", [0.1, 0.5, 2.0])
def test_excess_matches_direct(rng, t):
    dist = _law(rng, 6, 2)
    cfg = KernelConfig(2, 1.0)
    y = ProjectivePoint(rng.standard_normal(3))
    assert log_likelihood(dist, y, t, cfg) == pytest.approx(
        log_likelihood_direct(dist, y, t, cfg), rel=1e-12)


def test_guards(rng):
    dist = _law(rng, 3, 2)
    with pytest.raises(SeriesGuardError):
        log_likelihood(dist, dist.points[0], 0.01, KernelConfig(2, 1.0))
    with pytest.raises(ValidationError):
        ExcessObjective(dist, 1.0, KernelConfig(3, 1.0))
    with pytest.raises(ValidationError):
        ExcessObjective(dist, 1.0, KernelConfig(2, 2.0))


@pytest.mark.parametrize("t", [0.05, 1.0, 20.0])
def test_point_mass_minimizer(t):
    x = np.array([0.3, -0.4, 0.5])
    dist = point_mass(x / np.linalg.norm(x))
    est = estimate_mean_set(dist, t, KernelConfig(2, 1.0), OPT)
    assert len(est.minimizers) == 1
    assert dist_res(est.best, dist.points[0]) < 1e-7
    # dense-grid oracle: nothing on a grid beats the support point
    grid = normalize_rows(np.random.default_rng(2).standard_normal((2000, 3)), 1.0)
    obj = ExcessObjective(dist, t, KernelConfig(2, 1.0))
    assert min(obj.value(g) for g in grid) >= obj.value(dist.coords[0])


def test_swap_symmetry():
    dist = EmpiricalDistribution.from_points([[1, 0, 0], [0, 1, 0]], [0.5, 0.5], 1.0)
    cfg = KernelConfig(2, 1.0)
    est = estimate_mean_set(dist, 0.5, cfg, OPT)
    swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1.0]])
    for p in est.minimizers:
        q = ProjectivePoint(swap @ p.coords)
        assert log_likelihood(dist, q, 0.5, cfg) == pytest.approx(
            log_likelihood(dist, p, 0.5, cfg), abs=1e-10)


def test_mixture_reaches_eigen_prediction():
    dist = EmpiricalDistribution.from_points([[1, 0, 0], [0.6, 0.8, 0], [0, 0.6, 0.8]],
                                             [0.5, 0.3, 0.2], 1.0)
    est = estimate_mean_set(dist, 30.0, KernelConfig(2, 1.0), OPT)
    v = second_moment(dist).top_eigenspace[:, 0]
    assert len(est.minimizers) == 1
    assert dist_res(est.best, ProjectivePoint(v)) < 1e-3


def test_estimate_invariants(rng):
    dist = _law(rng, 4, 2)
    est = estimate_mean_set(dist, 0.3, KernelConfig(2, 1.0), OPT)
    cfg = KernelConfig(2, 1.0)
    for p in est.near_optimal:
        assert log_likelihood(dist, p, 0.3, cfg) <= est.objective + 1e-8 * max(1, abs(est.objective))
    pts = est.near_optimal
    for i in range(len(pts)):
        for j in range(i):
            assert dist_res(pts[i], pts[j]) > OPT.cluster_radius
    assert est.diagnostics["restarts"] >= dist.n + OPT.n_random


def test_rescale_examples(rng):
    dist = _law(rng, 4, 2)
    est = estimate_mean_set(dist, 5.0, KernelConfig(2, 1.0), OPT)
    same = rescale_mean_set(est, 1.0, 1.0)
    assert all(a == b for a, b in zip(same.minimizers, est.minimizers))
    big = rescale_mean_set(est, 1.0, 2.0)
    assert big.t == 20.0 and big.radius == 2.0
    assert all(dist_res(a.scaled(0.5), b) < 1e-15 for a, b in zip(big.minimizers, est.minimizers))
    back = rescale_mean_set(rescale_mean_set(est, 1.0, 3.0), 3.0, 1.0)
    for a, b in zip(back.minimizers, est.minimizers):
        assert np.allclose(a.coords, b.coords, rtol=0, atol=1e-14)
    assert back.objective == pytest.approx(est.objective, abs=1e-14)
    with pytest.raises(ValidationError):
        rescale_mean_set(est, 1.0, -1.0)


def test_rescale_objective_shift(rng):
    dist = _law(rng, 3, 3)
    est = estimate_mean_set(dist, 2.0, KernelConfig(3, 1.0), OPT)
    big = rescale_mean_set(est, 1.0, 2.5)
    direct = log_likelihood(dist.rescaled(2.5), big.best, big.t, KernelConfig(3, 2.5))
    assert big.objective == pytest.approx(direct, abs=1e-10)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_rotation_equivariance(seed):
    rng = np.random.default_rng(seed)
    dist = _law(rng, 4, 2)
    Q = special_ortho_group.rvs(3, random_state=seed)
    cfg = KernelConfig(2, 1.0)
    y = rng.standard_normal(3)
    a = log_likelihood(dist, ProjectivePoint(y), 0.8, cfg)
    b = log_likelihood(dist.transformed(Q), ProjectivePoint(Q @ y), 0.8, cfg)
    assert a == pytest.approx(b, abs=1e-12)


# --- intrinsic mean ---

def test_intrinsic_point_mass():
    dist = point_mass([0.0, 0.6, 0.8])
    est = intrinsic_mean(dist, OPT)
    assert dist_res(est.best, dist.points[0]) < 1e-8
    assert est.objective == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("theta", [0.1, 0.4, 0.7])
def test_intrinsic_midpoint(theta):
    a = np.array([math.cos(theta), math.sin(theta), 0.0])
    b = np.array([math.cos(theta), -math.sin(theta), 0.0])
    dist = EmpiricalDistribution.from_points([a, b], [0.5, 0.5], 1.0)

    # golden-section oracle along the connecting geodesic
    def along(s):
        return intrinsic_objective(dist, ProjectivePoint([math.cos(s), math.sin(s), 0.0]))

    s_star = optimize.minimize_scalar(along, bracket=(-theta, 0.0, theta), method="golden",
                                      tol=1e-12).x
    est = intrinsic_mean(dist, OPT)
    assert dist_res(est.best, ProjectivePoint([math.cos(s_star), math.sin(s_star), 0.0])) < 1e-6
    assert dist_res(est.best, ProjectivePoint([1.0, 0.0, 0.0])) < 1e-8


def test_intrinsic_sign_invariance(rng):
    dist = _law(rng, 5, 2)
    y = rng.standard_normal(3)
    assert intrinsic_objective(dist, ProjectivePoint(y)) == intrinsic_objective(
        dist, ProjectivePoint(-y))


def test_uniform_sample_flat():
    dist = sample_uniform(2, 1.0, 400, seed=3)
    obj = ExcessObjective(dist, 40.0, KernelConfig(2, 1.0))
    # the rescaled excess stays O(1) even though L_t itself is flat to 1e-52
    vals = [obj.value(v) for v in normalize_rows(np.eye(3), 1.0)]
    assert all(np.isfinite(vals)) and max(abs(v) for v in vals) < 10
