"""Exception hierarchy.

Validation problems (bad input, bad configuration) derive from
``ValidationError``; numerical failures (series guard, truncation, optimizer
non-convergence) derive from ``NumericalError``. The CLI maps the former to
exit status 1 and the latter to exit status 2.
"""


class RPDiffusionError(Exception):
    pass


class ValidationError(RPDiffusionError, ValueError):
    pass


class NumericalError(RPDiffusionError, ArithmeticError):
    pass


class SeriesGuardError(NumericalError):
    """Diffusion time below the configured ``t_min``."""


class TruncationError(NumericalError):
    """Tail majorant could not be pushed below ``tol`` within ``max_terms``."""


class RegimeError(NumericalError):
    """Expansion regime (|sum c| < 1/2) not reached."""


class ConvergenceError(NumericalError):
    pass


class UnderSampledError(ValidationError):
    pass
