"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class ChanresError(Exception):
    """Base class for all toolkit errors."""


class InvalidInput(ChanresError, ValueError):
    """Malformed user input (files, flags, matrices)."""


class DimensionMismatch(InvalidInput):
    """Operand dimensions are incompatible."""


class NonTracePreserving(InvalidInput):
    """Partial trace of a Choi matrix over the output is not the identity."""


class NonCompletelyPositive(InvalidInput):
    """A Choi matrix (or Kraus data) fails positive semidefiniteness."""


class NotHermitian(InvalidInput):
    """A matrix that must be Hermitian is not."""


class NotADensityMatrix(InvalidInput):
    """A state fails positivity or unit trace."""


class NotADistribution(InvalidInput):
    """A vector is not a probability distribution."""


class NotCqChannel(InvalidInput):
    """The channel is not classical-quantum (off-diagonal input blocks do not vanish)."""


class SupportViolation(InvalidInput):
    """A max-relative entropy is infinite because a support condition fails."""


class UnsupportedKind(ChanresError):
    """The requested free-set kind does not support the operation."""


class UnsupportedKindDimensions(UnsupportedKind):
    """A free-set kind cannot be instantiated at the requested dimensions."""


class UnsupportedMonotone(ChanresError):
    """A state monotone is not recognised by the power optimisers."""


class BudgetExceeded(ChanresError):
    """A construction exceeds the configured computational budget."""


class SolverFailure(ChanresError):
    """The conic solver did not return an optimal point.

    The failing :class:`~chanres.conic.SolveResult` is attached as ``result``.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result

    @property
    def status(self) -> str:
        return getattr(self.result, "status", "Unknown")


class InfeasibleProgram(SolverFailure):
    """The solver produced a certificate of primal infeasibility."""
