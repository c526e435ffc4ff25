"""Double-arch analysis of convex polygons."""
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import BadParameters, NotDoubleArch
from .geom import EPS_GEOM, ConvexPolygon2, RigidMotion, hull2


class DoubleArchDecomposition(BaseModel):
    """A chord ``(i, j)`` of a polygon and the vertices strictly above / below it.

    "Above" is the left side of the chord directed from vertex ``i`` to vertex ``j``.
    """

    model_config = ConfigDict(frozen=True)

    chord: tuple[int, int]
    upper: tuple[int, ...]
    lower: tuple[int, ...]

    @model_validator(mode="after")
    def _partition(self) -> "DoubleArchDecomposition":
        indices = sorted((*self.chord, *self.upper, *self.lower))
        if indices != list(range(len(indices))):
            raise ValueError(f"chord, upper and lower must partition the vertex indices, got {indices}")
        return self

    @property
    def size(self) -> int:
        return 2 + len(self.upper) + len(self.lower)

    @property
    def nontrivial(self) -> bool:
        return bool(self.upper) and bool(self.lower)


def _band_split(P: ConvexPolygon2, i: int, j: int, eps: float) -> DoubleArchDecomposition | None:
    start, end = P.vertices[i], P.vertices[j]
    length = float(np.linalg.norm(end - start))
    unit = (end - start) / length
    others = np.array([k for k in range(P.n) if k not in (i, j)])
    rel = P.vertices[others] - start
    along = rel @ unit
    height = unit[0] * rel[:, 1] - unit[1] * rel[:, 0]
    if np.any(along <= eps) or np.any(along >= length - eps) or np.any(np.abs(height) <= eps):
        return None
    return DoubleArchDecomposition(
        chord=(i, j),
        upper=tuple(int(k) for k in others[height > 0]),
        lower=tuple(int(k) for k in others[height < 0]),
    )


def is_double_arch_chord(P: ConvexPolygon2, i: int, j: int, eps: float = EPS_GEOM) -> bool:
    """True when every other vertex lies strictly inside the band over chord ``(i, j)`` and off it."""
    return i != j and _band_split(P, i, j, eps) is not None


def chord_pairs(P: ConvexPolygon2) -> list[tuple[int, int]]:
    """All vertex pairs, longest first; ties go to the smaller index pair."""
    pairs = [(i, j) for i in range(P.n) for j in range(i + 1, P.n)]
    lengths = {pair: float(np.linalg.norm(P.vertices[pair[1]] - P.vertices[pair[0]])) for pair in pairs}
    return sorted(pairs, key=lambda pair: (-lengths[pair], pair))


def double_arch_decompose(P: ConvexPolygon2, eps: float = EPS_GEOM) -> DoubleArchDecomposition:
    trivial: DoubleArchDecomposition | None = None
    for i, j in chord_pairs(P):
        decomposition = _band_split(P, i, j, eps)
        if decomposition is None:
            continue
        if decomposition.nontrivial:
            return decomposition
        trivial = trivial or decomposition
    if trivial is None:
        raise NotDoubleArch(f"no chord of the {P.n}-gon satisfies the band condition")
    return trivial


def normalize_to_chord(
    P: ConvexPolygon2, dec: DoubleArchDecomposition
) -> tuple[ConvexPolygon2, RigidMotion]:
    """Move the chord midpoint to the origin and turn the chord onto +x.

    The returned motion is a z-rotation plus xy translation, so it applies to
    the lifted polygon and to the polyhedron it came from alike.
    """
    start, end = P.vertices[dec.chord[0]], P.vertices[dec.chord[1]]
    direction = end - start
    angle = -math.atan2(direction[1], direction[0])
    c, s = math.cos(angle), math.sin(angle)
    mid = (start + end) / 2.0
    shift = (-(c * mid[0] - s * mid[1]), -(s * mid[0] + c * mid[1]))
    motion = RigidMotion.planar(angle, shift)
    return ConvexPolygon2(vertices=motion.apply(P.lift())[:, :2]), motion


def regular_polygon(n: int, circumradius: float = 1.0) -> ConvexPolygon2:
    if n < 3:
        raise BadParameters(f"a polygon needs n >= 3, got {n}")
    if circumradius <= 0:
        raise BadParameters("circumradius must be positive")
    angles = 2.0 * math.pi * np.arange(n) / n
    return ConvexPolygon2(vertices=circumradius * np.column_stack([np.cos(angles), np.sin(angles)]))


def flipped_right_triangle(leg_a: float = 2.0, leg_b: float = 1.0) -> ConvexPolygon2:
    """Right triangle united with its mirror image across the perpendicular bisector of the hypotenuse.

    Any non-isoceles choice of legs gives a convex quadrilateral with no nontrivial chord.
    """
    if leg_a <= 0 or leg_b <= 0 or math.isclose(leg_a, leg_b):
        raise BadParameters("legs must be positive and unequal")
    right, b, c = np.zeros(2), np.array([leg_a, 0.0]), np.array([0.0, leg_b])
    mid = (b + c) / 2.0
    axis = np.array([leg_b, leg_a]) / math.hypot(leg_a, leg_b)
    offset = right - mid
    along = (offset @ axis) * axis
    mirrored = mid + along - (offset - along)
    return hull2(np.array([right, b, c, mirrored]))
