"""Exception hierarchy shared by every plaquette module."""


class PlaquetteError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameters(PlaquetteError, ValueError):
    pass


class InvalidState(PlaquetteError, ValueError):
    pass


class NonlinearUnsupported(PlaquetteError):
    """A closed-form result was requested for an interacting system (U != 0)."""


class DegenerateFrequency(PlaquetteError):
    """A mode frequency vanished where a finite ratio is required."""


class DegenerateRatio(PlaquetteError):
    pass


class NotPeriodic(PlaquetteError):
    pass


class NumericalError(PlaquetteError):
    """Base for failures of the time integration."""


class NonFinite(NumericalError):
    pass


class ToleranceExceeded(NumericalError):
    """Norm or energy drift exceeded the configured tolerance.

    ``cell`` is filled in by the sweeps with the grid coordinates of the
    offending run.
    """

    def __init__(self, message, *, norm_drift=None, energy_drift=None, cell=None):
        super().__init__(message)
        self.norm_drift = norm_drift
        self.energy_drift = energy_drift
        self.cell = cell

    def __str__(self):
        base = super().__str__()
        if self.cell is not None:
            base += f" (cell {self.cell})"
        return base


class EmptyWindow(PlaquetteError, ValueError):
    pass


class EmptyPair(PlaquetteError, ValueError):
    pass


class ZeroImbalance(PlaquetteError, ValueError):
    pass
