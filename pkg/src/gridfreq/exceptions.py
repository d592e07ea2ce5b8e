class GridFreqError(ValueError):
    """Base class for domain errors raised by gridfreq."""


class TraceFormatError(GridFreqError):
    """Input file cannot be parsed under the declared format."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NoCompleteDaysError(GridFreqError):
    pass


class PowerImbalanceError(GridFreqError):
    def __init__(self, imbalance):
        super().__init__(f"power imbalance {imbalance:.6g}")
        self.imbalance = imbalance


class InhomogeneousDampingError(GridFreqError):
    pass


class DivergenceError(GridFreqError, ArithmeticError):
    def __init__(self, step):
        super().__init__(f"trajectory diverged (|omega| > 1e6) at step {step}")
        self.step = step


class FewLagsError(GridFreqError):
    pass
