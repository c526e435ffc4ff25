"""Latitude/longitude coordinates on the sphere through an equatorial vertex.

For a base vertex ``v`` in the plane z = 0 the sphere S_v is centered at the
origin with radius |v|.  A point ``p`` of S_v gets coordinates ``(d, beta)``:

* ``d`` is the arc distance from ``v`` to ``p`` (the latitude, in [0, pi]);
* ``beta`` is the angle about ``v``, right-handed, measured from the point where
  the circle of latitude ``d`` meets the equator counterclockwise of ``v``.

With ``e = v/|v|``, ``n = (0, 0, 1)`` and ``u = n x e`` this reads
``p = |v| (cos d e + sin d (cos beta u + sin beta n))``.

Rotating ``v`` by ``delta`` about an axis at latitude ``d`` lands on latitude
``t(d)``, and shifts longitude by the constant ``tau(d)``:
``J(d, beta) = (t(d), tau(d) + beta mod 2 pi)``.
"""
import enum
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import DegenerateInput, DegenerateLatitude, LatitudeMismatch
from .geom import EPS_GEOM, Rotation

POLE_GUARD = 1e-7
TWO_PI = 2.0 * math.pi
_UP = np.array([0.0, 0.0, 1.0])


def wrap_longitude(beta: float) -> float:
    wrapped = math.fmod(beta, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


class Branch(str, enum.Enum):
    UP = "up"
    DOWN = "down"


class SphericalCoord(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: float
    beta: float

    @field_validator("d")
    @classmethod
    def _latitude(cls, value: float) -> float:
        if not 0.0 <= value <= math.pi:
            raise DegenerateInput(f"latitude {value} outside [0, pi]")
        return value

    @field_validator("beta")
    @classmethod
    def _longitude(cls, value: float) -> float:
        if not math.isfinite(value):
            raise DegenerateInput("longitude must be finite")
        return wrap_longitude(value)


class BaseVertex(BaseModel):
    """A polygon vertex on the equator z = 0; fixes the frame of S_v."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    v: np.ndarray

    @field_validator("v", mode="before")
    @classmethod
    def _equatorial(cls, value) -> np.ndarray:
        v = np.array(value, dtype=float).reshape(3)
        radius = float(np.linalg.norm(v))
        if not math.isfinite(radius) or radius < EPS_GEOM:
            raise DegenerateInput("base vertex must be non-zero")
        if abs(v[2]) > EPS_GEOM:
            raise DegenerateInput(f"base vertex must lie in z = 0, got z = {v[2]}")
        v[2] = 0.0
        v.setflags(write=False)
        return v

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.v))

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Orthonormal ``(e, u, n)``: toward v, along the meridian, toward the positive pole."""
        e = self.v / self.radius
        return e, np.cross(_UP, e), _UP


def antipode(base: BaseVertex) -> BaseVertex:
    return BaseVertex(v=-base.v)


def t_of_d(d: float, delta: float) -> float:
    """Third side of the isoceles spherical triangle with legs ``d`` and apex angle ``delta``."""
    return 2.0 * math.asin(min(1.0, math.sin(d) * math.sin(delta / 2.0)))


def tau_of_d(d: float, delta: float) -> float:
    """Negated base angle of the same triangle; the longitude shift applied by J."""
    if d < POLE_GUARD or d > math.pi - POLE_GUARD:
        raise DegenerateLatitude(f"latitude {d} is at a pole of the base frame")
    return -math.atan2(1.0, math.cos(d) * math.tan(delta / 2.0))


def to_coords(p, base: BaseVertex) -> SphericalCoord:
    p = np.asarray(p, dtype=float)
    norm = float(np.linalg.norm(p))
    if abs(norm - base.radius) > EPS_GEOM * max(1.0, base.radius):
        raise DegenerateInput(f"point at radius {norm} is not on the sphere of radius {base.radius}")
    e, u, n = base.frame()
    unit = p / norm
    along = float(unit @ e)
    across = float(np.linalg.norm(unit - along * e))
    if across < POLE_GUARD:
        raise DegenerateLatitude("point coincides with the base vertex or its antipode")
    return SphericalCoord(d=math.atan2(across, along), beta=math.atan2(float(unit @ n), float(unit @ u)))


def from_coords(c: SphericalCoord, base: BaseVertex) -> np.ndarray:
    e, u, n = base.frame()
    direction = math.cos(c.d) * e + math.sin(c.d) * (math.cos(c.beta) * u + math.sin(c.beta) * n)
    return base.radius * direction


def J(a, base: BaseVertex, delta: float) -> np.ndarray:
    """Image of the base vertex under the rotation by ``delta`` about ``a``."""
    return Rotation(axis=a, angle=delta).apply(base.v)


def fiber_map(c: SphericalCoord, delta: float) -> SphericalCoord:
    """J restricted to the circle of latitude ``c.d``, in coordinates."""
    return SphericalCoord(d=t_of_d(c.d, delta), beta=tau_of_d(c.d, delta) + c.beta)


def fiber_inverse(target: SphericalCoord, base: BaseVertex, delta: float, d: float) -> SphericalCoord:
    if abs(target.d - t_of_d(d, delta)) >= EPS_GEOM:
        raise LatitudeMismatch(
            f"target latitude {target.d} is not t({d}) = {t_of_d(d, delta)} for delta = {delta}"
        )
    return SphericalCoord(d=d, beta=target.beta - tau_of_d(d, delta))


def f_curve_axis(base: BaseVertex, delta: float, d: float, branch: Branch = Branch.UP) -> np.ndarray:
    """Axis on latitude ``d`` whose rotation moves the base vertex within the vertical plane through it.

    The image of ``v`` then projects onto the x-axis, so ``base.v`` must lie on it.
    """
    if abs(base.v[1]) > EPS_GEOM:
        raise DegenerateInput("the F-curve is defined for base vertices on the x-axis")
    target_longitude = math.pi / 2.0 if Branch(branch) is Branch.UP else 3.0 * math.pi / 2.0
    return from_coords(SphericalCoord(d=d, beta=target_longitude - tau_of_d(d, delta)), base)
