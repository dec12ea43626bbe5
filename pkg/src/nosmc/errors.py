"""Exception types raised by the gain pipeline, oracles, plant and simulator."""


class NosmcError(Exception):
    """Base class for every error raised by this package."""

    #: simulation time at which the error surfaced, filled in by the simulator
    t = None

    def at(self, t):
        self.t = t
        return self


class InfeasibleBounds(NosmcError):
    pass


class InvalidGain(NosmcError):
    pass


class DegenerateErrors(NosmcError):
    pass


class GainCeilingExceeded(NosmcError):
    """k2 computed from the switch errors is above the actuator ceiling k2M."""


class SaturatedGain(NosmcError):
    """k2 - k1*e2max - Ld <= 0, the smoothed-mode logarithm is undefined."""


class InvalidContext(NosmcError):
    pass


class NoRealRoot(NosmcError):
    pass


class MissingEvent(NosmcError):
    pass


class NonFiniteState(NosmcError):
    pass


class SingularAttitude(NosmcError):
    pass


class InfeasibleThrust(NosmcError):
    def __init__(self, msg, forces=None):
        super().__init__(msg)
        self.forces = forces


class UnknownScenario(NosmcError):
    pass


class GridTooLarge(NosmcError):
    pass
