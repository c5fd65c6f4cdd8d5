"""Exception hierarchy.

Validation errors (bad inputs, violated preconditions) are kept distinct
from computation errors (an algorithm failed to converge or a certified
bound broke), so the command line front end can map them to different
exit codes.
"""


class ErgoptError(Exception):
    """Base class for all package errors."""


class ValidationError(ErgoptError):
    """Invalid input data or a violated precondition."""


class ComputationError(ErgoptError):
    """A computation failed or a certified bound was violated."""


class NonSquareMatrixError(ValidationError):
    """Transition matrix is not square or has entries outside {0, 1}."""


class DeadSymbolError(ValidationError):
    """A symbol has no outgoing or no incoming allowed transition."""


class DepthOverflowError(ValidationError):
    """Requested word depth exceeds the configured vertex budget."""


class InadmissiblePointError(ValidationError):
    """A symbolic point or word violates the transition matrix."""


class InadmissibleCycleError(ValidationError):
    """A cycle word does not close admissibly."""


class SubshiftMismatchError(ValidationError):
    """Operands are defined over different subshifts."""


class SamplerFailureError(ComputationError):
    """A user-supplied sampler raised; carries the offending cylinder."""


class NoCycleError(ComputationError):
    """The word graph has no cycle (impossible for a valid subshift)."""


class BudgetExceededError(ValidationError):
    """Enumeration would exceed the configured cycle or vertex budget."""


class NonConvergenceError(ComputationError):
    """An iteration exceeded its pass or iteration cap."""


class CalibrationViolationError(ComputationError):
    """A deficiency value exceeded the zero tolerance from above."""


class ResolutionTooCoarseError(ValidationError):
    """Cylinder depth does not separate the points of an orbit."""


class DeltaTooLargeError(ValidationError):
    """Pseudo-orbit jump size is too large for shadowing."""


class BranchMissingError(ComputationError):
    """No admissible inverse branch continues a pseudo-orbit jump."""


class BoundViolatedError(ComputationError):
    """A measured quantity exceeded its certified bound."""


class PressureNotZeroError(ValidationError):
    """Operation requires a pressure-normalized potential."""


class RootFindingFailureError(ComputationError):
    """Bracketed root finding failed (non-monotone branch)."""


class SeparationTooSmallError(ValidationError):
    """Bump radius is not below half the orbit separation."""


class DepthBudgetError(ValidationError):
    """Resolving the bump radius would exceed the vertex budget."""


class LockFailedError(ComputationError):
    """Brute force found a maximizing orbit other than the target."""


class NotExtremeError(ComputationError):
    """Target measure is not an extreme point of the moment polytope."""
