"""Exception hierarchy shared by every pii_lab module."""

from __future__ import annotations


class PiiLabError(Exception):
    """Base class for all library errors."""


class PoleOfGamma(PiiLabError, ValueError):
    """Gamma evaluated at a nonpositive integer."""


class OriginSingularity(PiiLabError, ValueError):
    """A function singular at the origin was evaluated there."""


class OutOfSector(PiiLabError, ValueError):
    """Argument outside the sector where a continuation formula is defined."""


class ConvergenceFailure(PiiLabError, ArithmeticError):
    """A series or iteration did not reach its error budget."""


class NotSingularRegime(PiiLabError, ValueError):
    """Parameters (alpha, k) do not satisfy k**2 > cos(pi*alpha)**2."""


class TruncationDiverging(PiiLabError, ArithmeticError):
    """Requested truncation index lies beyond the smallest term of a divergent series."""


class NearPole(PiiLabError, ArithmeticError):
    """Evaluation point too close to a predicted pole of the asymptotic formula."""


class StepSizeUnderflow(PiiLabError, ArithmeticError):
    """The adaptive integrator could not make progress.

    Parameters
    ----------
    message : str
        Human readable description.
    x : float
        Abscissa where the step size collapsed.
    """

    def __init__(self, message: str, x: float = float("nan")):
        super().__init__(message)
        self.x = x


class PoleFitFailure(PiiLabError, ArithmeticError):
    """Laurent fit at a movable pole exceeded its residual threshold."""


class AmbiguousResidue(PiiLabError, ArithmeticError):
    """Approach data do not single out the residue sign."""


class OnContour(PiiLabError, ValueError):
    """Sectionally analytic matrix evaluated on one of its jump rays."""


class BranchViolation(PiiLabError, ValueError):
    """Conformal map evaluated outside the disk where its branch is fixed."""
