"""Exception hierarchy shared by every module."""


class DwellCertError(Exception):
    """Base class for all package errors."""


class NumericalFailure(DwellCertError):
    """An iterative numerical method did not converge or lost progress."""


class SystemFormatError(DwellCertError, ValueError):
    """A system document is malformed or violates a model invariant."""


class InadmissibleSignal(DwellCertError, ValueError):
    """A switching signal violates the dwell-time or no-repeat constraint."""


class CapExceeded(DwellCertError):
    """Cycle enumeration would exceed the configured cap."""

    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"cycle count {count} exceeds cap {cap}")


class CertificateError(DwellCertError, ValueError):
    """A certificate does not match its cycle family or file schema."""


class ConversionFailure(DwellCertError):
    """Certificate conversion exhausted its retry schedule."""

    def __init__(self, message, best_margin):
        self.best_margin = best_margin
        super().__init__(f"{message} (best coupling margin {best_margin:.3e})")
