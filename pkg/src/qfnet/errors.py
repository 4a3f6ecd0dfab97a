"""Exception types shared across the package."""


class NonFiniteMetricError(ValueError):
    """A metric is undefined for its inputs (zero variance, zero norm, ...)."""


class DataFormatError(ValueError):
    """Malformed input data (CSV rows, config files, circuit text)."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for error reporting."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
