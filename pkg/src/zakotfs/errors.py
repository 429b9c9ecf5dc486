"""Exception hierarchy shared by all zakotfs modules."""


class ZakOtfsError(ValueError):
    """Base class for configuration and precondition errors."""


class NotInvertible(ZakOtfsError):
    pass


class InvalidModulus(ZakOtfsError):
    pass


class IndexOutOfRange(ZakOtfsError, IndexError):
    pass


class InvalidParams(ZakOtfsError):
    pass


class GridMismatch(ZakOtfsError):
    pass


class SupportTooLarge(ZakOtfsError):
    pass


class SupportMismatch(ZakOtfsError):
    pass


class SingularSystem(ZakOtfsError):
    pass


class InvalidConfig(ZakOtfsError):
    pass


class ZeroSignal(ZakOtfsError):
    pass


class LengthMismatch(ZakOtfsError):
    pass
