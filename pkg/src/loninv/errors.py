"""Exception types shared across the package."""


class LonInvError(Exception):
    """Base class for all package errors."""


class ResourceLimitError(LonInvError):
    """Raised when a requested Fock-space dimension exceeds the configured cap."""


class NotUnitaryError(LonInvError, ValueError):
    pass


class NotHermitianError(LonInvError, ValueError):
    pass


class NonPhysicalStateError(LonInvError, ValueError):
    """Density matrix fails Hermiticity, trace or positivity checks."""


class DimensionMismatchError(LonInvError, ValueError):
    pass


class FrameConstructionError(LonInvError):
    pass


class ReconstructionError(LonInvError):
    """The tomography design cannot determine the state."""


class ConvergenceError(LonInvError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual
