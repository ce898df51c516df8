class ChdlError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(ChdlError, ValueError):
    pass


class NotHermitianError(ChdlError, ValueError):
    pass


class NotPSDError(ChdlError, ValueError):
    pass


class InfeasibleEnergyError(ChdlError, ValueError):
    """The energy bound does not exceed the ground-state energy."""


class PreconditionError(ChdlError, ValueError):
    pass


class ConvergenceError(ChdlError, RuntimeError):
    pass
