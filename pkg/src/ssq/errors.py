"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid argument: bad family/size combination, out-of-range index, etc."""


class RepresentationError(ValueError):
    """State does not live where the operation requires (e.g. not symmetric)."""


class ResourceLimitError(RuntimeError):
    """Requested system size exceeds the configured qubit cap."""


class StateFormatError(ValueError):
    """State file failed to parse or violates normalization tolerances."""


class ZeroMeanSpinError(ValueError):
    """Mean spin vanishes, so 'orthogonal to the mean spin' is undefined."""


class FrameConstraintError(ValueError):
    """Frame does not satisfy the zero-mean / variance-floor preconditions."""


class NoAdmissibleFrameError(RuntimeError):
    """No frame on the search grid satisfies the criterion's preconditions."""
