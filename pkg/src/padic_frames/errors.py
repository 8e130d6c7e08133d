"""Exception and warning types raised across the package."""


class PadicFrameError(Exception):
    """Base class for all package errors."""


class InvalidParams(PadicFrameError, ValueError):
    pass


class IllPosedPairing(PadicFrameError):
    """The character value would not be constant on the given cosets."""


class WindowOverflow(PadicFrameError):
    pass


class ShiftOutOfWindow(PadicFrameError):
    pass


class SingularSystem(PadicFrameError):
    pass


class Infeasible(PadicFrameError):
    """The mask constraint system has no solution within tolerance."""


class ZeroSetRejected(PadicFrameError):
    """The zero placement cannot define a mask (not covering or too many zeros)."""

    def __init__(self, message, classification):
        super().__init__(message)
        self.classification = classification


class LeafNotAnnihilated(PadicFrameError):
    pass


class NoTiling(PadicFrameError):
    """No admissible coset family tiles the outer ring."""

    def __init__(self, message, forbidden=()):
        super().__init__(message)
        self.forbidden = sorted(forbidden)


class BudgetExceeded(PadicFrameError):
    pass


class DivisionByZeroCell(PadicFrameError):
    pass


class WindowTooSmall(PadicFrameError):
    pass


class HypothesisViolated(UserWarning):
    """A bound was evaluated outside the hypotheses under which it is proved."""
