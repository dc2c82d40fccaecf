"""Exception types raised across the package."""


class UnstableModelError(ValueError):
    """Raised when an operation requires a stable model but the companion
    spectral radius is >= 1 - 1e-10."""

    def __init__(self, spectral_radius, message=None):
        self.spectral_radius = float(spectral_radius)
        if message is None:
            message = (
                f"model is not stable: companion spectral radius "
                f"{self.spectral_radius:.6g} >= 1"
            )
        super().__init__(message)


class RankDeficiencyError(ValueError):
    """Raised when the lagged regressor matrix of a least-squares fit is
    rank deficient. ``channels`` lists the (0-based) offending channels."""

    def __init__(self, channels, message=None):
        self.channels = tuple(channels)
        if message is None:
            message = (
                f"rank-deficient regressor matrix; offending channels "
                f"(0-based): {list(self.channels)}"
            )
        super().__init__(message)


class DareConvergenceError(RuntimeError):
    """Raised when the Riccati fixed-point iteration fails to converge or the
    converged solution is not stabilizing."""

    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class SingularInnovationError(RuntimeError):
    """Raised when the innovation covariance encountered along a Riccati
    iteration is numerically singular."""
