"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RendezvousError(Exception):
    """Base class for all package errors."""


class GridError(RendezvousError):
    pass


class DimensionTooSmall(GridError):
    pass


class InvalidDoor(GridError):
    pass


class OutOfGrid(GridError):
    pass


class NotOnBoundary(GridError):
    pass


class AtCorner(GridError):
    """The vertex is a corner, so its boundary line is ambiguous."""


class ParallelLines(GridError):
    pass


class NotActive(RendezvousError):
    pass


class InvalidParams(RendezvousError):
    pass


class IllegalResourceMove(RendezvousError):
    """A strategy proposed a resource move outside the legal set."""


class IllegalScript(IllegalResourceMove):
    pass


class NoEscape(RendezvousError):
    """The SSYNC escape policy found no admissible resource move."""

    def __init__(self, message: str, config=None):
        super().__init__(message)
        self.config = config


class ViolationDetected(RendezvousError):
    """Two robots collided in a way the protocol should never produce."""

    def __init__(self, message: str, config=None):
        super().__init__(message)
        self.config = config


class MalformedTrace(RendezvousError):
    pass


class StateSpaceExceeded(RendezvousError):
    pass
