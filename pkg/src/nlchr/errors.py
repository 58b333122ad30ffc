"""Exception hierarchy shared by all modules."""


class NLCHError(Exception):
    """Base class for every error raised by nlchr."""

    kind = "error"


class DomainError(NLCHError, ValueError):
    kind = "domain"


class ResolutionError(NLCHError, ValueError):
    kind = "resolution"


class GridMismatchError(NLCHError, ValueError):
    kind = "grid-mismatch"


class ConvergenceError(NLCHError, RuntimeError):
    kind = "non-convergence"


class BlowUpError(NLCHError, RuntimeError):
    kind = "blow-up"


class HypothesisError(NLCHError, ValueError):
    """A data hypothesis (U02, U03, G3, ...) is violated.

    The message always starts with the hypothesis tag, e.g. ``U03: ...``.
    """

    kind = "hypothesis"

    def __init__(self, tag, message):
        self.tag = tag
        super().__init__(f"{tag}: {message}")


class ConfigError(NLCHError, ValueError):
    kind = "config"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StepError(NLCHError, RuntimeError):
    """Wraps an error raised inside the time loop with the failing step index."""

    kind = "step"

    def __init__(self, step_index, cause):
        self.step_index = step_index
        self.cause = cause
        super().__init__(f"step {step_index}: {cause}")
