"""Exception types shared across the package."""


class FockgenError(Exception):
    """Base class for all package-specific failures."""


class DomainError(FockgenError, ValueError):
    """An argument lies outside the documented validity range."""


class TruncationError(FockgenError):
    """Too much amplitude has leaked onto the top Fock levels."""


class DegenerateQubit(FockgenError):
    """Qubit basis decomposition requested with omega_x = omega_z = 0."""


class EigensolveFailure(FockgenError):
    """The dense Hermitian eigensolver did not converge."""


class NonPositiveDrive(FockgenError):
    """A resonance condition yielded a drive frequency <= 0."""


class ZeroBessel(FockgenError):
    """J_N(x_d) vanishes, so every Rabi frequency of the plan is zero."""


class PhaseUnsolvable(FockgenError):
    """The per-step drive-phase equations admit no solution."""


class CollisionDetected(FockgenError):
    """A planned drive frequency is simultaneously resonant with another process."""

    def __init__(self, message, collisions=None):
        super().__init__(message)
        self.collisions = list(collisions) if collisions else []


class PictureMismatch(FockgenError):
    """Operands live in different pictures (original vs displaced)."""


class PositivityLoss(FockgenError):
    """A density matrix acquired a significantly negative eigenvalue."""


class StepSizeUnderflow(FockgenError):
    """The adaptive integrator failed to reach the requested time."""
