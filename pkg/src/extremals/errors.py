"""Exception types shared across the package."""


class ExtremalsError(Exception):
    """Base class for all errors raised by this package."""


class FieldSyntaxError(ExtremalsError):
    """A field expression failed to parse or used a disallowed construct."""


class DimensionError(ExtremalsError):
    """Mismatched dimensions between fields, points, or covectors."""


class EvaluationError(ExtremalsError):
    """A field evaluated to a non-finite value."""


class FrameError(ExtremalsError):
    """Frame fields are degenerate or dependent at a queried point."""


class CovectorError(ExtremalsError):
    """A covector violated the nonvanishing requirements of the lift."""


class NonSkewError(ExtremalsError):
    """A matrix expected to be skew-symmetric is not."""


class ScenarioError(ExtremalsError):
    """The requested operation is undefined for the scenario at hand."""


class SwitchSolveError(ExtremalsError):
    """The switch-parameter equation has no admissible solution."""


class IntegrationError(ExtremalsError):
    """Adaptive integration failed (step underflow, step budget, bad state)."""


class MultipleSwitchError(IntegrationError):
    """More than one switching occurred inside the chart; shrink the chart."""


class NoScheduleError(ExtremalsError):
    """Grid enumeration found no feasible bang-bang schedule."""


class ConfigError(ExtremalsError):
    """A run configuration file is missing, malformed, or inconsistent."""
