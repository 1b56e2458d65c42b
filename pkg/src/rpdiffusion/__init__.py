"""Diffusion means on real projective spaces RP^m(r).

Heat kernel series, long-time limits through the second-moment matrix, and
the isometric quadratic embedding with its extrinsic means.
"""
from .errors import (ConvergenceError, NumericalError, RegimeError, RPDiffusionError,
                     SeriesGuardError, TruncationError, UnderSampledError, ValidationError)
from .manifold import (EmpiricalDistribution, ProjectivePoint, SpherePoint, dist_chord, dist_geo,
                       dist_geo_p, dist_res, point_mass, quotient, sample_uniform)
from .special import gegenbauer, gegenbauer_bound, gegenbauer_table, sphere_area
from .heat_kernel import (KernelConfig, TermFunctions, kernel_rp, kernel_rp_radius_transfer,
                          kernel_sphere, taylor_remainder_check)
from .eigen import SecondMoment, jacobi_eigh, limit_set_prediction, second_moment
from .optim import OptimizerSettings
from .diffusion_mean import (MeanEstimate, estimate_mean_set, intrinsic_mean, log_likelihood,
                             log_likelihood_grad, rescale_mean_set)
from .extrinsic import (chordal_identity_check, embed, embed_radius, extrinsic_mean,
                        extrinsic_mean_rescaled, f_map, special_radius)
from .simulation import WalkConfig, brownian_endpoints, kernel_mc_check
from .convergence import SweepSpec, extrinsic_consistency, run_sweep, short_time_baseline

__all__ = [
    "ConvergenceError",
    "NumericalError",
    "RegimeError",
    "RPDiffusionError",
    "SeriesGuardError",
    "TruncationError",
    "UnderSampledError",
    "ValidationError",
    "EmpiricalDistribution",
    "ProjectivePoint",
    "SpherePoint",
    "dist_chord",
    "dist_geo",
    "dist_geo_p",
    "dist_res",
    "point_mass",
    "quotient",
    "sample_uniform",
    "gegenbauer",
    "gegenbauer_bound",
    "gegenbauer_table",
    "sphere_area",
    "KernelConfig",
    "TermFunctions",
    "kernel_rp",
    "kernel_rp_radius_transfer",
    "kernel_sphere",
    "taylor_remainder_check",
    "SecondMoment",
    "jacobi_eigh",
    "limit_set_prediction",
    "second_moment",
    "OptimizerSettings",
    "MeanEstimate",
    "estimate_mean_set",
    "intrinsic_mean",
    "log_likelihood",
    "log_likelihood_grad",
    "rescale_mean_set",
    "chordal_identity_check",
    "embed",
    "embed_radius",
    "extrinsic_mean",
    "extrinsic_mean_rescaled",
    "f_map",
    "special_radius",
    "WalkConfig",
    "brownian_endpoints",
    "kernel_mc_check",
    "SweepSpec",
    "extrinsic_consistency",
    "run_sweep",
    "short_time_baseline",
]

__version__ = "0.1.0"
