"""Exception types raised across the package."""


class QHamError(Exception):
    """Base class for all package errors."""


class OutOfBall(QHamError, ValueError):
    """An eigenvalue phase left the principal-logarithm ball."""

    def __init__(self, phase, radius):
        self.phase = float(phase)
        self.radius = float(radius)
        super().__init__(f"eigenvalue phase {self.phase:.6g} outside log ball of radius {self.radius:.6g}")


class NotTangent(QHamError, ValueError):
    pass


class GroupMismatch(QHamError, ValueError):
    pass


class EmptySurface(QHamError, ValueError):
    pass


class ChartFailure(QHamError, RuntimeError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


class NoConvergence(QHamError, RuntimeError):
    pass


class EmptyLevel(QHamError, RuntimeError):
    """Every restart of the level-set solver failed."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__(f"no point of the level set mu = 1 found after {len(self.failures)} restarts")


class NotOnLevel(QHamError, ValueError):
    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(f"point is not on the level set: |log mu(x)| = {self.residual:.3e} >= {self.tol:.1e}")


class UnsupportedType(QHamError, NotImplementedError):
    pass


class DegenerateClass(UserWarning):
    """The conjugacy class of a central element is a single point."""
