"""Polygonal and prism sections of an oriented polyhedron, plus a heuristic orientation search."""
import itertools
import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import DegenerateInput, EmptySlice, NoSection
from .geom import EPS_GEOM, PLANE_HASH, ConvexPolygon2, Polyhedron, RigidMotion, hull2, hull_indices

logger = logging.getLogger(__name__)

# Prism slices are taken just inside the nearest vertex layer.
PRISM_INSET = 1e-6

# Above this many vertex triples the plane search samples instead of enumerating.
MAX_TRIPLES = 200_000
_COUNT_CHUNK = 4096

OrientationKind = Literal["all", "plane", "axis"]


class PolygonalSection(BaseModel):
    """Flat polygon ``Q ∩ {z = 0}`` that also equals the shadow of ``Q``.

    ``planar_vertices`` lists the Q-vertex behind each polygon vertex, in
    polygon order.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    polygon: ConvexPolygon2
    plane_motion: RigidMotion = Field(default_factory=RigidMotion.identity)
    planar_vertices: tuple[int, ...]
    off_plane_vertices: tuple[int, ...]


class PrismSection(BaseModel):
    """``Q ∩ {|z| <= h}`` is the vertical prism over ``polygon``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    polygon: ConvexPolygon2
    h: float = Field(gt=0)
    plane_motion: RigidMotion = Field(default_factory=RigidMotion.identity)


def find_polygonal_section(
    Q: Polyhedron, eps: float = EPS_GEOM, motion: RigidMotion | None = None
) -> PolygonalSection:
    z = Q.vertices[:, 2]
    planar = np.flatnonzero(np.abs(z) < eps)
    if len(planar) < 3:
        raise NoSection("too-few-planar-vertices", f"{len(planar)} vertices on z = 0")
    flat = Q.vertices[planar, :2]
    try:
        order = hull_indices(flat, eps)
    except DegenerateInput:
        raise NoSection("planar-vertices-not-hull", "planar vertices are collinear") from None
    if len(order) != len(planar):
        raise NoSection("planar-vertices-not-hull", f"{len(planar) - len(order)} planar vertices are not corners")
    polygon = ConvexPolygon2(vertices=flat[order])
    off_plane = np.flatnonzero(np.abs(z) >= eps)
    if off_plane.size:
        clearance = polygon.margins(Q.vertices[off_plane, :2])
        if clearance.min() <= eps:
            worst = int(off_plane[int(np.argmin(clearance))])
            raise NoSection("off-plane-vertex-outside", f"vertex {worst} clears the polygon by {clearance.min():.3g}")
    return PolygonalSection(
        polygon=polygon,
        plane_motion=motion or RigidMotion.identity(),
        planar_vertices=tuple(int(planar[k]) for k in order),
        off_plane_vertices=tuple(int(k) for k in off_plane),
    )


def cross_section(Q: Polyhedron, z0: float, eps: float = EPS_GEOM) -> ConvexPolygon2:
    """Slice ``Q ∩ {z = z0}`` by clipping the hull edges against the plane."""
    height = Q.vertices[:, 2] - z0
    if height.max() <= eps or height.min() >= -eps:
        raise EmptySlice(f"plane z = {z0} misses the interior")
    points = [Q.vertices[np.abs(height) < eps, :2]]
    a, b = Q.edges[:, 0], Q.edges[:, 1]
    ha, hb = height[a], height[b]
    crossing = (ha * hb < 0) & (np.abs(ha) >= eps) & (np.abs(hb) >= eps)
    t = ha[crossing] / (ha[crossing] - hb[crossing])
    start, end = Q.vertices[a[crossing], :2], Q.vertices[b[crossing], :2]
    points.append(start + t[:, None] * (end - start))
    pts = np.concatenate(points)
    if len(pts) < 3:
        raise EmptySlice(f"plane z = {z0} meets fewer than three edges")
    try:
        return hull2(pts, eps)
    except DegenerateInput:
        raise EmptySlice(f"plane z = {z0} only grazes the boundary") from None


def same_polygon(first: ConvexPolygon2, second: ConvexPolygon2, eps: float = EPS_GEOM) -> bool:
    """Vertexwise equality up to ``eps``, ignoring the starting vertex."""
    if first.n != second.n:
        return False
    gaps = np.linalg.norm(first.vertices[:, None, :] - second.vertices[None, :, :], axis=2)
    return bool(np.all(gaps.min(axis=1) <= eps))


def find_prism_section(
    Q: Polyhedron, eps: float = EPS_GEOM, motion: RigidMotion | None = None
) -> PrismSection:
    z = Q.vertices[:, 2]
    if np.any(np.abs(z) < eps):
        raise NoSection("vertex-on-mid-plane", "a vertex lies on z = 0")
    if not (np.any(z > 0) and np.any(z < 0)):
        raise NoSection("empty-mid-slice", "z = 0 misses the polyhedron")
    h = float(np.min(np.abs(z)))
    polygon = cross_section(Q, 0.0, eps)
    for level in (h, -h):
        if not same_polygon(cross_section(Q, (1.0 - PRISM_INSET) * level, eps), polygon, eps):
            raise NoSection("slice-mismatch", f"cross-section changes before |z| = {h:.6g}")
    reach = polygon.margins(Q.vertices[:, :2])
    if reach.min() < -eps:
        raise NoSection("vertex-outside-prism", f"a vertex projects {-reach.min():.3g} outside the prism")
    return PrismSection(polygon=polygon, h=h, plane_motion=motion or RigidMotion.identity())


def face_count(Q: Polyhedron) -> int:
    return len(Q.face_planes()[1])


def _canonical_sign(normals: np.ndarray) -> np.ndarray:
    """Flip each row so its first clearly non-zero coordinate is positive."""
    leading = np.argmax(np.abs(normals) > PLANE_HASH, axis=1)
    signs = np.sign(normals[np.arange(len(normals)), leading])
    signs[signs == 0] = 1.0
    return normals * signs[:, None]


def _vertex_triples(n: int, max_triples: int, seed: int) -> np.ndarray:
    """Every vertex triple, or a seeded sample of ``max_triples`` of them for large meshes."""
    if math.comb(n, 3) <= max_triples:
        return np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    triples = np.sort(np.random.default_rng(seed).integers(0, n, size=(max_triples, 3)), axis=1)
    distinct = (triples[:, 0] < triples[:, 1]) & (triples[:, 1] < triples[:, 2])
    return np.unique(triples[distinct], axis=0)


def _on_plane_counts(vertices: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(vertices @ normals.T - offsets) < PLANE_HASH, axis=0)


def vertex_planes(
    Q: Polyhedron,
    eps: float = EPS_GEOM,
    limit: int | None = None,
    max_triples: int = MAX_TRIPLES,
    seed: int = 0,
) -> list[tuple[np.ndarray, float, int]]:
    """Distinct planes through three or more vertices as ``(normal, offset, vertex count)``.

    Sorted by decreasing vertex count, then by distance from the origin. Meshes
    with more than ``max_triples`` vertex triples only see a sample of them.
    """
    triples = _vertex_triples(Q.n, max_triples, seed)
    p0, p1, p2 = (Q.vertices[triples[:, k]] for k in range(3))
    normals = np.cross(p1 - p0, p2 - p0)
    lengths = np.linalg.norm(normals, axis=1)
    keep = lengths > eps
    if not np.any(keep):
        return []
    normals = normals[keep] / lengths[keep, None]
    offsets = np.einsum("ij,ij->i", normals, p0[keep])
    flip = np.where(np.abs(offsets) > eps, np.sign(offsets), 0.0)
    normals[flip < 0] *= -1.0
    offsets = np.abs(offsets)
    through_origin = flip == 0
    normals[through_origin] = _canonical_sign(normals[through_origin])
    keys = np.round(np.column_stack([normals, offsets]) / PLANE_HASH).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = np.sort(first)
    normals, offsets = normals[first], offsets[first]
    counts = np.concatenate(
        [
            _on_plane_counts(Q.vertices, normals[k : k + _COUNT_CHUNK], offsets[k : k + _COUNT_CHUNK])
            for k in range(0, len(normals), _COUNT_CHUNK)
        ]
    )
    order = np.lexsort((offsets, -counts))[:limit]
    return [(normals[k], float(offsets[k]), int(counts[k])) for k in order]


def candidate_axes(Q: Polyhedron) -> list[np.ndarray]:
    """Face normals, vertex directions and edge directions, with ``a`` and ``-a`` merged."""
    centroid = Q.vertices.mean(axis=0)
    face_normals, _ = Q.face_planes()
    vertex_dirs = Q.vertices - centroid
    edge_dirs = Q.vertices[Q.edges[:, 1]] - Q.vertices[Q.edges[:, 0]]
    axes: list[np.ndarray] = []
    seen: set[tuple[int, ...]] = set()
    for group in (face_normals, vertex_dirs, edge_dirs):
        lengths = np.linalg.norm(group, axis=1)
        group = group[lengths > EPS_GEOM] / lengths[lengths > EPS_GEOM, None]
        for axis in _canonical_sign(group):
            key = tuple(np.round(axis / PLANE_HASH).astype(np.int64))
            if key not in seen:
                seen.add(key)
                axes.append(axis)
    return axes


def candidate_orientations(
    Q: Polyhedron, cap: int = 10_000, kind: OrientationKind = "all", seed: int = 0
) -> list[RigidMotion]:
    """Rigid motions worth trying before a section test; the identity comes first.

    ``plane`` bring coplanar vertex sets onto z = 0; ``axis`` put a face normal,
    vertex direction or edge direction on the z-axis with the mid-plane of the
    solid along it at z = 0. This is a heuristic, not a complete search; ``seed``
    picks the sampled vertex triples of very large meshes.
    """
    motions = [RigidMotion.identity()]
    if kind in ("all", "plane"):
        for normal, offset, _ in vertex_planes(Q, limit=cap, seed=seed):
            if len(motions) >= cap:
                break
            motions.append(RigidMotion.align_to_z(normal, origin=offset * normal))
    if kind in ("all", "axis"):
        for axis in candidate_axes(Q):
            if len(motions) >= cap:
                break
            heights = Q.vertices @ axis
            middle = 0.5 * (heights.max() + heights.min())
            motions.append(RigidMotion.align_to_z(axis, origin=middle * axis))
    logger.debug(f"[orientations] {len(motions)} candidates of kind {kind!r} for {Q.n} vertices")
    return motions[:cap]
