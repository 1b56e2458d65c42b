import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rpdiffusion.eigen import jacobi_eigh, limit_set_prediction, second_moment
from rpdiffusion.errors import ValidationError
from rpdiffusion.manifold import (EmpiricalDistribution, ProjectivePoint, dist_res, normalize_rows,
                                  point_mass, sample_uniform)


def test_point_mass():
    sm = second_moment(point_mass([1.0, 0.0, 0.0]))
    assert np.array_equal(sm.matrix, np.diag([1.0, 0.0, 0.0]))
    assert np.allclose(sm.eigenvalues, [1, 0, 0], atol=1e-15)
    assert sm.top_multiplicity == 1
    pred = limit_set_prediction(sm)
    assert pred.unique and pred.flag == "unique"
    assert pred.points[0] == ProjectivePoint([1.0, 0.0, 0.0])


def test_point_mass_radius_three():
    pred = limit_set_prediction(second_moment(point_mass([0.0, 3.0, 0.0])))
    assert dist_res(pred.points[0], ProjectivePoint([0.0, 3.0, 0.0], 3.0)) < 1e-15
    assert pred.points[0].radius == 3.0


def test_uniform_sample():
    sm = second_moment(sample_uniform(2, 1.0, 100_000, seed=1), mult_tol=0.05)
    assert np.allclose(sm.eigenvalues, 1 / 3, atol=1e-2)
    assert sm.top_multiplicity == 3
    pred = limit_set_prediction(sm)
    assert not pred.unique and pred.flag == "eigenspace dimension 3"
    assert sm.eigenspace_residual(np.array([0.3, -0.2, 0.9])) < 1e-12


def test_two_point_closed_form():
    s = 1 / math.sqrt(2)
    dist = EmpiricalDistribution.from_points([[1.0, 0.0, 0.0], [s, s, 0.0]], [0.5, 0.5], 1.0)
    sm = second_moment(dist)
    # 2x2 block [[3/4, 1/4], [1/4, 1/4]]: eigenvalues (1 +- 1/sqrt 2)/2
    lam = (1 + s) / 2
    assert sm.eigenvalues[0] == pytest.approx(lam, rel=1e-14)
    assert sm.eigenvalues[1] == pytest.approx((1 - s) / 2, rel=1e-13)
    v = np.array([0.25, lam - 0.75, 0.0])
    assert sm.eigenspace_residual(v) < 1e-14


def test_representative_invariance(rng):
    X = normalize_rows(rng.standard_normal((7, 4)), 1.0)
    w = rng.dirichlet(np.ones(7))
    flip = np.where(rng.random(7) < 0.5, -1.0, 1.0)[:, None]
    a = second_moment(EmpiricalDistribution(X, w, 1.0))
    b = second_moment(EmpiricalDistribution(X * flip, w, 1.0))
    assert np.array_equal(a.matrix, b.matrix)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_jacobi_rejects_bad_input():
    with pytest.raises(ValidationError):
        jacobi_eigh(np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


@given(arrays(np.float64, (5, 5), elements=st.floats(-3, 3)))
@settings(max_examples=60, deadline=None)
def test_jacobi_matches_eigh(B):
    A = B + B.T
    w, V = jacobi_eigh(A)
    ref = np.linalg.eigvalsh(A)[::-1]
    scale = max(1.0, np.abs(A).max())
    assert np.allclose(w, ref, atol=1e-10 * scale)
    assert np.allclose(V.T @ V, np.eye(5), atol=1e-12)
    assert np.linalg.norm(V @ np.diag(w) @ V.T - A) <= 1e-10 * scale * 5


@given(st.integers(2, 6), st.integers(1, 12), st.floats(0.3, 4.0), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_reconstruction_and_scaling(m, n, r, seed):
    rng = np.random.default_rng(seed)
    X = normalize_rows(rng.standard_normal((n, m + 1)), r)
    w = rng.dirichlet(np.ones(n))
    big = second_moment(EmpiricalDistribution(X, w, r))
    unit = second_moment(EmpiricalDistribution(X / r, w, 1.0))
    V, lam = big.eigenvectors, big.eigenvalues
    assert np.linalg.norm(V @ np.diag(lam) @ V.T - big.matrix) <= 1e-10 * np.trace(big.matrix)
    assert np.allclose(big.eigenvalues, r * r * unit.eigenvalues, atol=1e-12 * r * r)
    assert big.top_multiplicity == unit.top_multiplicity
    if big.top_multiplicity == 1 and big.gap > 1e-6 * big.eigenvalues[0]:
        assert unit.eigenspace_residual(V[:, 0]) < 1e-6
