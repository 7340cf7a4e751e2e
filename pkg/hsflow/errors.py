# Top-level error and warning classes


class HSFlowError(Exception):
    pass


class HSFlowWarning(Warning):
    pass


# Data errors


class ConstraintViolated(HSFlowError, ValueError):
    """
    Peakon amplitudes do not sum to zero, so the datum has no finite energy.
    """


# Flow errors


class BlowupBeforeT(HSFlowError):
    """
    A gradient blows up before the requested time.
    """


class CollisionDetected(HSFlowError):
    """
    Two peakon positions met or crossed during integration.
    """


# Numerical errors


class QuadratureUnresolved(HSFlowError):
    """
    Grid refinement did not stabilise a weak-form integral.
    """


class ContractFailed(HSFlowError):
    """
    A numerical contract asserted by a scenario did not hold.
    """


class SubsamplingWarning(HSFlowWarning):
    pass


# Configuration errors


class ConfigInvalid(HSFlowError):
    """
    A scenario configuration could not be parsed or validated.
    """


# Registry errors


class ImplementationNotFound(HSFlowError, LookupError):
    """
    No implementation is registered under the requested name.
    """
