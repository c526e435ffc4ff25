"""Core primitives: rotations, projection, planar hulls and containment margins.

Points are plain ``numpy`` arrays (``(3,)`` / ``(2,)`` or stacked ``(n, 3)`` /
``(n, 2)``); the composite values (rotations, polygons, polyhedra, rigid motions)
are frozen pydantic models so they can be shared freely between threads.
"""
import math

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.spatial import ConvexHull
from scipy.spatial.transform import Rotation as _ScipyRotation

from .errors import DegenerateInput, NonConvexInput

EPS_GEOM = 1e-9
# Facet equations closer than this are treated as one face plane.
PLANE_HASH = 1e-6

Point3 = NDArray[np.float64]
Point2 = NDArray[np.float64]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_points(values, dim: int) -> np.ndarray:
    """Coerce ``values`` to a finite float array of shape ``(n, dim)``."""
    points = np.array(values, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != dim:
        raise DegenerateInput(f"expected points of dimension {dim}, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise DegenerateInput("coordinates must be finite")
    return points


class Rotation(BaseModel):
    """Right-handed rotation by ``angle`` radians about the unit vector ``axis``.

    The angle is stored wrapped into (-pi, pi]; ``magnitude`` is |angle|, the
    distance from the identity used when talking about "small" rotations.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: np.ndarray
    angle: float

    @field_validator("axis", mode="before")
    @classmethod
    def _unit_axis(cls, value) -> np.ndarray:
        axis = np.array(value, dtype=float).reshape(3)
        norm = float(np.linalg.norm(axis))
        if not math.isfinite(norm) or norm < EPS_GEOM:
            raise DegenerateInput("rotation axis must be a finite non-zero vector")
        # unit axes are kept bit-for-bit so stored rotations reload exactly
        if abs(norm - 1.0) > 1e-15:
            axis = axis / norm
        return _frozen(axis)

    @field_validator("angle")
    @classmethod
    def _wrap_angle(cls, value: float) -> float:
        if not math.isfinite(value):
            raise DegenerateInput("rotation angle must be finite")
        wrapped = math.remainder(value, 2.0 * math.pi)
        if wrapped <= -math.pi:
            wrapped += 2.0 * math.pi
        return wrapped

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(axis=(0.0, 0.0, 1.0), angle=0.0)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Rotation":
        rotvec = _ScipyRotation.from_matrix(np.asarray(matrix, dtype=float)).as_rotvec()
        angle = float(np.linalg.norm(rotvec))
        if angle < 1e-15:
            return cls.identity()
        return cls(axis=rotvec / angle, angle=angle)

    @property
    def magnitude(self) -> float:
        return abs(self.angle)

    def matrix(self) -> np.ndarray:
        """Rodrigues matrix I + sin(t) K + (1 - cos(t)) K^2."""
        x, y, z = self.axis
        k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
        return np.eye(3) + math.sin(self.angle) * k + (1.0 - math.cos(self.angle)) * (k @ k)

    def apply(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.matrix().T

    def inverse(self) -> "Rotation":
        return Rotation(axis=self.axis, angle=-self.angle)


def compose_rotations(first: Rotation, second: Rotation) -> Rotation:
    """Rotation equal to applying ``first`` and then ``second``."""
    return Rotation.from_matrix(second.matrix() @ first.matrix())


def rotate(r: Rotation, p) -> np.ndarray:
    return r.apply(p)


def conjugate_axis(b_rot: Rotation, a, gamma: float) -> Rotation:
    """Rotation by ``gamma`` about b_rot(a).

    Equals b_rot . rho_a^gamma . b_rot^-1 pointwise.
    """
    return Rotation(axis=b_rot.apply(np.asarray(a, dtype=float)), angle=gamma)


def project(p) -> np.ndarray:
    """Orthogonal projection onto the xy-plane."""
    return np.array(np.asarray(p, dtype=float)[..., :2])


class RigidMotion(BaseModel):
    """Orientation-preserving rigid motion ``p -> matrix @ p + translation``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    translation: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _special_orthogonal(cls, value) -> np.ndarray:
        matrix = np.array(value, dtype=float).reshape(3, 3)
        if not np.allclose(matrix @ matrix.T, np.eye(3), atol=1e-9) or np.linalg.det(matrix) < 0:
            raise DegenerateInput("rigid motion matrix must lie in SO(3)")
        return _frozen(matrix)

    @field_validator("translation", mode="before")
    @classmethod
    def _vector(cls, value) -> np.ndarray:
        return _frozen(np.array(value, dtype=float).reshape(3))

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(matrix=np.eye(3), translation=np.zeros(3))

    @classmethod
    def from_rotation(cls, r: Rotation, translation=(0.0, 0.0, 0.0)) -> "RigidMotion":
        return cls(matrix=r.matrix(), translation=translation)

    @classmethod
    def planar(cls, angle: float, shift=(0.0, 0.0)) -> "RigidMotion":
        """Rotation about the z-axis by ``angle`` followed by an xy translation."""
        c, s = math.cos(angle), math.sin(angle)
        matrix = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return cls(matrix=matrix, translation=(shift[0], shift[1], 0.0))

    @classmethod
    def align_to_z(cls, direction, origin=(0.0, 0.0, 0.0)) -> "RigidMotion":
        """Motion sending ``origin`` to the xy-plane and ``direction`` to +z."""
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        z = np.array([0.0, 0.0, 1.0])
        cross = np.cross(n, z)
        s, c = float(np.linalg.norm(cross)), float(n @ z)
        if s < 1e-12:
            r = Rotation.identity() if c > 0 else Rotation(axis=(1.0, 0.0, 0.0), angle=math.pi)
        else:
            r = Rotation(axis=cross, angle=math.atan2(s, c))
        matrix = r.matrix()
        lifted = matrix @ np.asarray(origin, dtype=float)
        return cls(matrix=matrix, translation=(0.0, 0.0, -lifted[2]))

    def apply(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.matrix.T + self.translation

    def then(self, other: "RigidMotion") -> "RigidMotion":
        """Motion applying ``self`` first and ``other`` second."""
        return RigidMotion(
            matrix=other.matrix @ self.matrix,
            translation=other.matrix @ self.translation + other.translation,
        )

    def inverse(self) -> "RigidMotion":
        return RigidMotion(matrix=self.matrix.T, translation=-(self.matrix.T @ self.translation))


class ConvexPolygon2(BaseModel):
    """Counterclockwise, strictly convex polygon in the plane."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: np.ndarray

    @field_validator("vertices", mode="before")
    @classmethod
    def _strictly_convex(cls, value) -> np.ndarray:
        vertices = as_points(value, 2)
        if len(vertices) < 3:
            raise DegenerateInput("a polygon needs at least three vertices")
        prev = np.roll(vertices, 1, axis=0)
        nxt = np.roll(vertices, -1, axis=0)
        turns = _cross(vertices - prev, nxt - vertices)
        if np.any(turns <= 0.0):
            raise DegenerateInput("polygon vertices must turn strictly counterclockwise")
        return _frozen(vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def lift(self) -> np.ndarray:
        """Vertices as points of the z = 0 plane in 3-space."""
        return np.column_stack([self.vertices, np.zeros(self.n)])

    def margins(self, points) -> np.ndarray:
        """Signed inward distance of each point to the nearest edge line."""
        pts = as_points(points, 2)
        start = self.vertices
        direction = np.roll(self.vertices, -1, axis=0) - start
        unit = direction / np.linalg.norm(direction, axis=1)[:, None]
        rel = pts[:, None, :] - start[None, :, :]
        inward = unit[None, :, 0] * rel[..., 1] - unit[None, :, 1] * rel[..., 0]
        return inward.min(axis=1)


def _cross(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    return u[..., 0] * w[..., 1] - u[..., 1] * w[..., 0]


def hull_indices(points, eps: float = EPS_GEOM) -> list[int]:
    """Monotone-chain hull; indices of the strictly convex corners, counterclockwise.

    Ties are broken lexicographically; a point within ``eps`` of the segment
    joining its hull neighbours is dropped.
    """
    pts = as_points(points, 2)
    order = np.lexsort((pts[:, 1], pts[:, 0]))

    def chain(sequence) -> list[int]:
        kept: list[int] = []
        for idx in sequence:
            while len(kept) >= 2:
                o, a, b = pts[kept[-2]], pts[kept[-1]], pts[idx]
                base = float(np.linalg.norm(b - o))
                if float(_cross(a - o, b - o)) > eps * max(base, eps):
                    break
                kept.pop()
            kept.append(int(idx))
        return kept

    lower = chain(order)
    upper = chain(order[::-1])
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 3:
        raise DegenerateInput("points are collinear within tolerance")
    return ring


def hull2(points, eps: float = EPS_GEOM) -> ConvexPolygon2:
    pts = as_points(points, 2)
    return ConvexPolygon2(vertices=pts[hull_indices(pts, eps)])


def contains_strict(poly: ConvexPolygon2, p) -> float:
    """Signed margin of ``p``: positive inside, zero on the boundary, negative outside."""
    return float(poly.margins(p)[0])


def containment_margin(inner: ConvexPolygon2, outer: ConvexPolygon2) -> float:
    """Smallest margin of an ``inner`` vertex in ``outer``; > 0 means inner sits in int(outer)."""
    return float(outer.margins(inner.vertices).min())


class Polyhedron(BaseModel):
    """Convex polyhedron given by its extreme vertices.

    ``edges`` holds index pairs of the (triangulated) hull edges; it is computed
    on validation and carried along unchanged by rigid motions.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: np.ndarray
    edges: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _extreme_vertices(cls, data):
        if not isinstance(data, dict):
            return data
        vertices = as_points(data.get("vertices"), 3)
        if len(vertices) < 4:
            raise DegenerateInput("a polyhedron needs at least four vertices")
        centered = vertices - vertices.mean(axis=0)
        spread = np.linalg.svd(centered, compute_uv=False)
        if spread[-1] <= EPS_GEOM * max(spread[0], 1.0):
            raise DegenerateInput("vertices are coplanar")
        hull = ConvexHull(vertices)
        if len(hull.vertices) != len(vertices):
            missing = sorted(set(range(len(vertices))) - set(int(i) for i in hull.vertices))
            raise NonConvexInput(f"vertices {missing} are not extreme points")
        return {"vertices": _frozen(vertices), "edges": _frozen(_simplex_edges(hull.simplices))}

    @property
    def n(self) -> int:
        return len(self.vertices)

    def transformed(self, motion: RigidMotion) -> "Polyhedron":
        # rigid motions keep every vertex extreme, so skip revalidation
        return Polyhedron.model_construct(
            vertices=_frozen(motion.apply(self.vertices)), edges=self.edges
        )

    def rotated(self, r: Rotation) -> "Polyhedron":
        return self.transformed(RigidMotion.from_rotation(r))

    def face_planes(self) -> tuple[np.ndarray, np.ndarray]:
        """Outward unit normals and positive offsets of the merged hull facets."""
        hull = ConvexHull(self.vertices)
        merged: list[np.ndarray] = []
        for equation in hull.equations:
            if not any(np.max(np.abs(equation - other)) < PLANE_HASH for other in merged):
                merged.append(equation)
        planes = np.array(merged)
        return planes[:, :3], -planes[:, 3]


def _simplex_edges(simplices: np.ndarray) -> np.ndarray:
    pairs = np.concatenate([simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [0, 2]]])
    pairs = np.sort(pairs, axis=1)
    return np.unique(pairs, axis=0)


def shadow(q: Polyhedron, r: Rotation) -> ConvexPolygon2:
    """pi(r(Q)): hull of the projected rotated vertices."""
    return hull2(project(r.apply(q.vertices)))
