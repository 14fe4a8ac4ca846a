class ShiftLatticeError(Exception):
    """Base class for errors raised by this package."""


class InputError(ShiftLatticeError):
    """Malformed or degenerate input data (point files, filtrations, barcodes)."""


class BudgetError(ShiftLatticeError):
    """A computation would exceed its configured size budget."""


class MalformedStreamError(ShiftLatticeError):
    """An event stream violates the tower stream grammar."""

    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"event {index}: {message}"
        super().__init__(message)
        self.index = index
