"""Exception hierarchy for the local Rupert toolkit."""


class RupertError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(RupertError):
    """Points are collinear, a shadow collapsed, or an axis has zero length."""


class DegenerateLatitude(RupertError):
    """A point sits on (or too close to) a pole of the base-vertex coordinates."""


class LatitudeMismatch(RupertError):
    """A target point does not lie on the latitude circle C_t(d)."""


class NotDoubleArch(RupertError):
    """No vertex pair of the polygon satisfies the strict band condition."""


class NoSection(RupertError):
    """The oriented polyhedron has no section of the requested kind."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class EmptySlice(RupertError):
    """The slicing plane misses the interior of the polyhedron."""


class NotFound(RupertError):
    """The rotation search exhausted its schedule."""


class UnknownSolid(RupertError):
    pass


class BadParameters(RupertError):
    pass


class MalformedOff(RupertError):
    pass


class NonConvexInput(RupertError):
    """A listed vertex is not an extreme point of the hull."""
