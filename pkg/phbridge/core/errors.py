"""Exception hierarchy.

Every error raised by the library derives from :class:`PhBridgeError`.  The
``exit_code`` class attribute is the process exit status the CLI maps the
error to; library code never inspects it.
"""

from __future__ import annotations


class PhBridgeError(Exception):
    """Base class for all library errors."""

    exit_code: int = 2


# ── Matrices and shapes ─────────────────────────────────────────────────────


class InvalidMatrix(PhBridgeError):
    """A matrix contains NaN or Inf entries."""


class ShapeError(PhBridgeError):
    """Operand dimensions are incompatible."""


class FileFormatError(PhBridgeError):
    """A system file could not be parsed or is internally inconsistent."""


class MissingChannel(PhBridgeError):
    """A trajectory lacks a channel required by the operation."""


# ── Structural preconditions ───────────────────────────────────────────────


class StructureError(PhBridgeError):
    """A relation or system does not have the required structure."""

    exit_code = 6


class NotMonotone(StructureError):
    pass


class NotResistive(StructureError):
    pass


class NotContraction(StructureError):
    pass


class PartialDomain(StructureError):
    pass


class NotMaximal(StructureError):
    pass


class FlavorMismatch(StructureError):
    pass


class NotGeometric(StructureError):
    pass


class NotDescriptor(StructureError):
    pass


class IndefiniteDissipation(StructureError):
    """``[[R, P], [P*, S]]`` is indefinite, so ``graph(-W)`` is not resistive."""


class ExtensionFailed(PhBridgeError):
    """A constructed extension or representation failed post-verification."""

    exit_code = 4


class KernelOverlap(PhBridgeError):
    """``ker E ∩ ker Q`` is nontrivial."""

    exit_code = 3


# ── Trajectories ───────────────────────────────────────────────────────────


class NotMember(PhBridgeError):
    """A sample does not lie in the relation it must belong to."""

    exit_code = 1


class InconsistentInitial(PhBridgeError):
    exit_code = 1


class ResidualTooLarge(PhBridgeError):
    exit_code = 1


class NoConsistentZ(PhBridgeError):
    exit_code = 1


# ── Pencils and simulation ─────────────────────────────────────────────────


class IrregularPencil(PhBridgeError):
    exit_code = 5


class InconsistentConstraints(PhBridgeError):
    exit_code = 5


class SingularShift(PhBridgeError):
    """The evaluation point is an eigenvalue of the pencil."""


class InvalidParameter(PhBridgeError):
    """A scalar argument is outside its admissible range."""
