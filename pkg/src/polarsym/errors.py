"""Exception hierarchy. Every error raised on purpose derives from PolarsymError."""


class PolarsymError(Exception):
    pass


class DimensionError(PolarsymError, ValueError):
    pass


class GeometryError(PolarsymError, ValueError):
    """Invalid half-space, cap or plane parameters."""


class DualOfCenter(PolarsymError, ValueError):
    pass


class GridError(PolarsymError, ValueError):
    pass


class PositivityError(PolarsymError, ValueError):
    pass


class ConstantFunction(PolarsymError):
    pass


class NotSeparable(PolarsymError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TangentOrEmpty(PolarsymError, ValueError):
    pass


class CapFitError(PolarsymError):
    pass


class AxisMismatch(PolarsymError):
    def __init__(self, message, shells=None):
        super().__init__(message)
        self.shells = shells


class MonotonicityError(PolarsymError, ValueError):
    pass


class RadialProbe(PolarsymError):
    pass


class NotEven(PolarsymError, ValueError):
    pass


class NotRadial(PolarsymError):
    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class HypothesisNotMet(PolarsymError, ValueError):
    """A theorem's input hypothesis (e.g. the decay flag) is absent."""


class UnpairedGrid(PolarsymError, ValueError):
    pass


class OutsideBall(PolarsymError, ValueError):
    pass


class PointsNotInH(PolarsymError, ValueError):
    pass


class ZeroFunction(PolarsymError, ValueError):
    pass


class DegenerateD(PolarsymError, ValueError):
    pass


class CollapseToZero(PolarsymError):
    pass


class NonConvergence(PolarsymError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class FormatError(PolarsymError, ValueError):
    """Malformed input file; message carries file and line context."""
