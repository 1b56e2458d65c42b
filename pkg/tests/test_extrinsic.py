import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rpdiffusion.eigen import second_moment
from rpdiffusion.errors import ValidationError
from rpdiffusion.extrinsic import (chordal_identity_check, embed, embed_array, embed_radius,
                                   embedding_dim, extrinsic_mean, extrinsic_mean_rescaled, f_map,
                                   isometry_errors, phi_tilde, residual_to, special_radius)
from rpdiffusion.manifold import (ProjectivePoint, dist_res, normalize_rows,
                                  point_mass, sample_uniform)
from rpdiffusion.optim import OptimizerSettings


def test_f1_examples():
    assert np.array_equal(f_map(1, [1.0, 0.0], [1.0, 0.0]), [1.0, 0.0])
    x1, x2 = 0.3, -1.7
    assert np.allclose(f_map(1, [x1, x2], [x1, x2]), [x1 * x1 - x2 * x2, 2 * x1 * x2], rtol=1e-15)


def test_f_map_errors():
    with pytest.raises(ValidationError):
        f_map(2, [1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(ValidationError):
        f_map(0, [1.0], [1.0])


@given(st.integers(1, 7), st.floats(-4, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_bilinear_symmetric(m, a, seed):
    rng = np.random.default_rng(seed)
    x, y, z = rng.standard_normal((3, m + 1))
    F = f_map(m, x, y)
    assert F.shape == (embedding_dim(m),)
    assert np.allclose(f_map(m, a * x, y), a * F, atol=1e-12 * (1 + abs(a)))
    assert np.allclose(f_map(m, x + z, y), F + f_map(m, z, y), atol=1e-12)
    assert np.array_equal(f_map(m, y, x), F)


def test_embed_example():
    r2 = math.sqrt(3.0)
    assert special_radius(2) == r2
    img = embed(ProjectivePoint([0.0, 0.0, r2], r2))
    assert abs(np.linalg.norm(img.coords) - 1.0) < 1e-12


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_embed_even_and_unit(m, seed):
    rm = special_radius(m)
    x = normalize_rows(np.random.default_rng(seed).standard_normal(m + 1), rm)
    a = embed(ProjectivePoint(x, rm))
    b = phi_tilde(-x)
    assert np.array_equal(phi_tilde(x), b)
    assert abs(np.linalg.norm(a.coords) - 1.0) < 1e-12


def test_embed_radius_checks():
    with pytest.raises(ValidationError):
        embed(ProjectivePoint([0.0, 0.0, 1.0]))
    rm = special_radius(3)
    a = ProjectivePoint([0.1, 0.2, 0.3, 0.4], rm)
    assert np.array_equal(embed_radius(a).coords, embed(a).coords)


@given(st.integers(2, 6), st.floats(0.2, 5.0), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_scaling_relations(m, r, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m + 1)
    assert np.allclose(phi_tilde(2 * x), 4 * phi_tilde(x), rtol=0, atol=1e-13 * np.sum(x * x))
    rm = special_radius(m)
    a = ProjectivePoint(x, rm)
    lhs = embed_radius(a.scaled(r / rm)).coords
    assert np.allclose(lhs, (r / rm) * embed(a).coords, rtol=0, atol=1e-13 * max(1, r))
    assert np.linalg.norm(lhs) == pytest.approx(r / rm, rel=1e-12)
    X = normalize_rows(rng.standard_normal((4, m + 1)), r)
    assert np.allclose(embed_array(X, r), [embed_radius(ProjectivePoint(v, r)).coords for v in X],
                       atol=1e-15)


@pytest.mark.parametrize("m", [2, 3, 5, 8])
def test_chordal_identity_examples(m):
    rm = special_radius(m)
    x = np.zeros(m + 1)
    x[0] = rm
    y = np.zeros(m + 1)
    y[1] = rm
    same = chordal_identity_check(ProjectivePoint(x, rm), ProjectivePoint(x, rm))
    assert same.lhs == 0.0 and abs(same.rhs) < 1e-14 and same.passed
    orth = chordal_identity_check(ProjectivePoint(x, rm), ProjectivePoint(y, rm))
    assert orth.lhs == pytest.approx(2 * (m + 1) / m, rel=1e-14) and orth.passed


def test_isometry_small():
    assert isometry_errors(3, 50, seed=1).max() < 1e-5


def test_inner_product_identity(rng):
    # <Phi[x], Phi[y]> is affine in <x,y>^2, so maximizing <Phi(y), E Phi(X)> maximizes E<X,y>^2
    m = 3
    rm = special_radius(m)
    X = normalize_rows(rng.standard_normal((6, m + 1)), rm)
    w = rng.dirichlet(np.ones(6))
    Y = normalize_rows(rng.standard_normal((3000, m + 1)), rm)
    mu = w @ phi_tilde(X)
    ext = phi_tilde(Y) @ mu
    quad = ((Y @ X.T) ** 2) @ w
    assert np.argmax(ext) == np.argmax(quad)
    slope, intercept = np.polyfit(quad, ext, 1)
    assert np.max(np.abs(slope * quad + intercept - ext)) < 1e-12


def test_point_mass_extrinsic():
    rm = special_radius(2)
    dist = point_mass(ProjectivePoint([0.2, -0.5, 0.7], rm))
    res = extrinsic_mean(dist, OptimizerSettings(n_random=4))
    assert res.status == "on_manifold"
    assert dist_res(res.point, dist.points[0]) < 1e-7


def test_matches_eigenvector(fixture_laws):
    for dist in fixture_laws.values():
        res = extrinsic_mean_rescaled(dist)
        v = second_moment(dist).top_eigenspace[:, 0]
        assert res.status == "projected"
        assert residual_to(res.point, ProjectivePoint(v)) < 1e-6
        assert res.point.radius == dist.radius


def test_uniform_near_degenerate():
    rm = special_radius(2)
    dist = sample_uniform(2, rm, 20_000, seed=4)
    res = extrinsic_mean(dist, OptimizerSettings(n_random=2, max_support_starts=4))
    assert res.embedded_mean_norm < 0.05
    assert extrinsic_mean(dist, degeneracy_tol=0.1).status == "degenerate"


def test_radius_guard():
    with pytest.raises(ValidationError):
        extrinsic_mean(point_mass([0.0, 0.0, 1.0]))
