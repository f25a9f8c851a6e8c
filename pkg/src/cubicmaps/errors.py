"""Exception types shared across modules."""


class CubicMapsError(Exception):
    pass


class DerivativeBlowup(CubicMapsError, ArithmeticError):
    """A parameter jet exceeded the blowup threshold; ``state`` holds the last jet."""

    def __init__(self, state, threshold):
        super().__init__(f"jet exceeded {threshold:g} at n={state.n}")
        self.state = state
        self.threshold = threshold


class DomainError(CubicMapsError, ValueError):
    pass


class DegenerateOrbit(CubicMapsError):
    pass


class AmbiguousNearBoundary(CubicMapsError):
    def __init__(self, msg, curve=None, distance=None):
        super().__init__(msg)
        self.curve = curve
        self.distance = distance


class CapExceeded(CubicMapsError):
    """Turning-point cap hit at depth ``k``; ``laps`` is the sequence computed so far."""

    def __init__(self, k, laps):
        super().__init__(f"turning-point cap exceeded at k={k}")
        self.k = k
        self.laps = list(laps)


class NewtonDivergence(CubicMapsError):
    pass


class MalformedSpec(CubicMapsError, ValueError):
    pass


class OverdeterminedSpec(CubicMapsError, ValueError):
    pass
