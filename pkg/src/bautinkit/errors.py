"""Exception hierarchy for bautinkit."""

from __future__ import annotations


class BautinKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(BautinKitError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class ConfigurationError(BautinKitError, ValueError):
    pass


class ZeroOnContour(BautinKitError):
    """The function is numerically zero somewhere on the counting contour."""

    def __init__(self, radius: float, min_modulus: float, max_modulus: float):
        self.radius = radius
        self.min_modulus = min_modulus
        self.max_modulus = max_modulus
        super().__init__(
            f"zero on contour |z|={radius:.6g}: min modulus {min_modulus:.3e} "
            f"vs max {max_modulus:.3e}"
        )


class NonConvergence(BautinKitError):
    """Adaptive sampling hit its cap before the phase could be tracked."""


class TailDomination(BautinKitError):
    """The truncation tail could not be dominated within the degree cap."""


class CentralParameter(BautinKitError):
    """The parameter is numerically in the central set (f_lambda == 0)."""


class Unstable(BautinKitError):
    """Multiplicity indicators did not settle; ``trace`` holds the evidence."""

    def __init__(self, message: str, trace=None):
        self.trace = trace or []
        super().__init__(message)


class NoFiniteN(BautinKitError):
    """No N <= k_max produced a stable ratio bound."""

    def __init__(self, message: str, trace=None):
        self.trace = trace or []
        super().__init__(message)


class NotStabilized(BautinKitError):
    """An estimate did not agree across two consecutive nested boxes."""

    def __init__(self, message: str, values=None):
        self.values = values or []
        super().__init__(message)


class RouteMismatch(BautinKitError):
    def __init__(self, ineq: int, growth: int):
        self.ineq = ineq
        self.growth = growth
        super().__init__(f"ineq route gives {ineq}, growth route gives {growth}")


class RootClusterError(BautinKitError):
    pass


class Unsupported(BautinKitError, TypeError):
    pass


class CertificateNotFound(BautinKitError):
    """No radius in [r/2, r] certified the minimum-modulus bound."""
