"""Exception types raised across the package."""


class PoleError(ValueError):
    """Evaluation requested at (or numerically at) a pole."""


class InsufficientSmoothnessError(ValueError):
    """Continuation needs more derivatives than the profile declares."""


class IntegrabilityError(ValueError):
    """An integral or index map would need an exponent at or below its threshold."""


class DivergenceError(IntegrabilityError):
    """A Mellin-type integral is evaluated outside its convergence half-plane."""


class TrappingError(RuntimeError):
    """A geodesic failed to exit within the configured time."""


class OutOfChartError(ValueError):
    """A ray lies outside the glancing coordinate neighbourhood."""


class ModelMismatchError(ValueError):
    """An operation that needs a specific model was handed another one."""


class ParameterError(ValueError):
    """Parameters violate a documented domain restriction."""


class FitError(RuntimeError):
    """Least-squares or Laurent fitting failed."""


class IllConditionedError(FitError):
    """Design matrix condition number above the allowed limit."""


class RankDeficiencyError(FitError):
    """Design matrix does not have full column rank."""


class VanishingWeightError(ValueError):
    """A weight that must be nonzero vanishes at a sampled point."""
