"""Exception types shared across the package."""


class PhaseLabError(Exception):
    """Base class for all phaselab errors."""


class ValidationError(PhaseLabError):
    """A configuration value or an operation precondition was violated."""


class GridMismatchError(ValidationError):
    """Two fields that must live on the same grid do not."""


class NumericalBlowupError(PhaseLabError):
    """Evolution produced non-finite values.

    ``engine`` and ``step_index`` are filled in by whichever driver has the
    context; they may be None when the blowup is detected inside a single
    operation.
    """

    def __init__(self, message, engine=None, step_index=None):
        super().__init__(message)
        self.engine = engine
        self.step_index = step_index

    def __str__(self):
        base = super().__str__()
        ctx = []
        if self.engine is not None:
            ctx.append(f"engine={self.engine}")
        if self.step_index is not None:
            ctx.append(f"step={self.step_index}")
        return f"{base} ({', '.join(ctx)})" if ctx else base
