import numpy as np
import pytest

from rpdiffusion.convergence import (SweepSpec, default_grid, extrinsic_consistency, run_sweep,
                                     short_time_baseline, trend)
from rpdiffusion.errors import ValidationError
from rpdiffusion.heat_kernel import KernelConfig
from rpdiffusion.manifold import EmpiricalDistribution, point_mass, sample_uniform
from rpdiffusion.optim import OptimizerSettings

OPT = OptimizerSettings(n_random=3, seed=2)


def test_spec_validation():
    dist = point_mass([0.0, 0.0, 1.0])
    cfg = KernelConfig(2, 1.0)
    with pytest.raises(ValidationError):
        SweepSpec(dist, [], cfg)
    with pytest.raises(ValidationError):
        SweepSpec(dist, [1.0, 1.0], cfg)
    with pytest.raises(ValidationError):
        SweepSpec(dist, [0.01, 1.0], cfg)
    assert default_grid(2.0) == [4.0, 8.0, 20.0, 40.0, 80.0, 160.0]


def test_trend():
    assert trend([3, 2, 1], 1e-4) == {"max_increment": -1.0, "inversions": 0, "monotone": True}
    t = trend([3, 2, 2 + 1e-5, 1], 1e-4)
    assert t["inversions"] == 1 and t["monotone"]
    assert not trend([3, 2, 2.5], 1e-4)["monotone"]


def test_point_mass_sweep():
    dist = point_mass([0.6, 0.0, 0.8])
    spec = SweepSpec(dist, [0.5, 5.0, 40.0], KernelConfig(2, 1.0), OPT)
    res = run_sweep(spec)
    assert [row.t for row in res.rows] == spec.t_grid
    assert np.all(res.distances < 1e-8)
    assert res.verdict["status"] == "pass"
    rep = extrinsic_consistency(spec, None)
    assert rep["passed"] and rep["extrinsic_vs_eigen"] < 1e-8 and rep["extrinsic_vs_diffusion"] < 1e-7
    base = short_time_baseline(spec, res)
    assert base["distance_short"] < 1e-7


def test_uniform_is_containment_only():
    dist = sample_uniform(2, 1.0, 100_000, seed=5)
    spec = SweepSpec(dist, [10.0, 40.0], KernelConfig(2, 1.0),
                     OptimizerSettings(n_random=2, max_support_starts=4), mult_tol=0.05)
    res = run_sweep(spec)
    assert res.verdict["multiplicity"] == 3
    assert res.verdict["status"] == "containment-only"
    assert np.all(res.distances < 1e-12)
    assert res.verdict["contained"]


def test_repeated_eigenvalue_is_flagged():
    dist = EmpiricalDistribution.from_points([[1, 0, 0], [0, 1, 0]], [0.5, 0.5], 1.0)
    spec = SweepSpec(dist, [40.0], KernelConfig(2, 1.0), OPT)
    rep = extrinsic_consistency(spec)
    assert rep["multiplicity"] == 2
    assert rep["passed"] is None
    assert "repeated top eigenvalue" in rep["flag"]


@pytest.mark.slow
def test_three_point_sweep(fixture_laws):
    dist = fixture_laws["rp2_three_point"]
    spec = SweepSpec(dist, default_grid(), KernelConfig(2, 1.0), OPT)
    res = run_sweep(spec)
    assert res.verdict["status"] == "pass"
    assert res.distances[-1] < 1e-3
    assert res.verdict["monotone"]
    assert all(row.dist_to_extrinsic is not None for row in res.rows)


def test_baseline_shape():
    dist = EmpiricalDistribution.from_points([[1, 0, 0], [0.9, 0.3, 0.2]], [0.7, 0.3], 1.0)
    spec = SweepSpec(dist, [0.05, 40.0], KernelConfig(2, 1.0), OPT)
    rep = short_time_baseline(spec)
    assert set(rep) >= {"distance_short", "distance_long", "difference"}
    assert rep["difference"] == pytest.approx(rep["distance_long"] - rep["distance_short"])
    assert rep["t_short"] == 0.05 and rep["t_long"] == 40.0
