"""Exception hierarchy shared by all modules."""


class SDPError(Exception):
    """Base class for errors raised by sdpath."""


class TerrainParseError(SDPError, ValueError):
    """Input could not be parsed; ``position`` names the offending line/record."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{position}: {message}"
        super().__init__(message)


class TerrainIndexError(SDPError, IndexError):
    pass


class DegenerateTerrainError(SDPError, ValueError):
    pass


class OffSurfaceError(SDPError, ValueError):
    pass


class EpsilonDomainError(SDPError, ValueError):
    pass


class UnknownNodeError(SDPError, KeyError):
    pass


class NoDescendingPathError(SDPError):
    pass


class WrongLocationKindError(SDPError, ValueError):
    pass


class FacesNotAdjacentError(SDPError, ValueError):
    pass


class MalformedPathError(SDPError, ValueError):
    pass
