"""Exception hierarchy shared by all modules."""


class NormPDEError(Exception):
    """Base class for every error raised by normpde."""


class ConfigurationError(NormPDEError, ValueError):
    """Invalid parameters or inconsistent configuration."""


class ValidationError(ConfigurationError):
    """A named configuration field failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ScenarioParseError(ConfigurationError):
    """Malformed scenario file; carries the offending line number."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class DegenerateKernelError(NormPDEError, ValueError):
    """The perception kernel is singular (mu == 0)."""


class NumericalBlowupError(NormPDEError, FloatingPointError):
    """Non-finite values appeared while integrating."""

    def __init__(self, step_index, message="non-finite density"):
        self.step_index = step_index
        super().__init__(f"step {step_index}: {message}")


class DomainError(NormPDEError, ValueError):
    """A requested window or coordinate lies outside the grid."""


class DegenerateWindowError(NormPDEError, ValueError):
    """A sampling window carries no density."""


class DegenerateWeightsError(NormPDEError, ValueError):
    """Weights for an average sum to zero."""


class UnsupportedRegimeError(NormPDEError, ValueError):
    """Parameters outside the regime an analysis supports (e.g. c*P_h <= 0)."""


class CallbackError(NormPDEError, RuntimeError):
    """A run callback raised; carries the callback name and simulation time."""

    def __init__(self, name, time, original):
        self.name = name
        self.time = time
        self.original = original
        super().__init__(f"callback {name!r} failed at t={time:.6g}: {original!r}")
