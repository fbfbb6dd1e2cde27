"""Exception types shared across the package."""


class MesobathError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitianError(MesobathError):
    """An operator required to be Hermitian is not, within tolerance."""

    def __init__(self, defect, tol):
        self.defect = float(defect)
        self.tol = float(tol)
        super().__init__(
            f"operator is not Hermitian: max|H - H^dag| = {self.defect:.3e} "
            f"exceeds tolerance {self.tol:.3e}"
        )


class DimensionMismatchError(MesobathError):
    """Operator or state dimensions are inconsistent."""


class EmptyKeepSetError(MesobathError):
    """A partial trace was asked to keep no tensor factors."""


class NoConvergenceError(MesobathError):
    """An iterative propagation step failed to reach its tolerance."""

    def __init__(self, residual, message="no convergence"):
        self.residual = float(residual)
        super().__init__(f"{message} (residual estimate {self.residual:.3e})")


class DimensionOverflowError(MesobathError):
    """A requested Hilbert space exceeds the configured dimension cap."""

    def __init__(self, dim, cap, detail=""):
        self.dim = int(dim)
        self.cap = int(cap)
        msg = f"total dimension {self.dim} exceeds cap {self.cap}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class GridMismatchError(MesobathError):
    """Two trajectories were compared on different time grids."""


class OrderTooHighError(MesobathError):
    """Requested series order exceeds the cost guard."""


class QuadratureUnderResolvedError(MesobathError):
    """Estimated quadrature error exceeds the requested tolerance."""

    def __init__(self, estimate, tol):
        self.estimate = float(estimate)
        self.tol = float(tol)
        super().__init__(
            f"quadrature error estimate {self.estimate:.3e} exceeds "
            f"tolerance {self.tol:.3e}; increase quadrature_points"
        )


class NotSimultaneouslyDiagonalizableError(MesobathError):
    """Component state and Hamiltonian do not commute well enough."""

    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(
            f"no common eigenbasis: residual off-diagonal {self.residual:.3e}"
        )


class ParseError(MesobathError):
    """A configuration file could not be parsed."""


class SchemaError(MesobathError):
    """A configuration file violates the expected schema."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n  - ".join(self.violations)
        super().__init__(f"configuration schema violations:\n  - {lines}")
