"""Certification engine for local Rupert and local reverse Rupert passages.

Both pipelines follow the same staged plan: orient the solid, find a section,
split the section polygon along a double-arch chord, then walk a shrinking
schedule of rotation sizes and latitudes on the F-curve until the whole
polyhedron verifies with a positive containment margin.
"""
import enum
import logging
import math
from collections.abc import Iterator
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import override

from .errors import DegenerateInput, NotDoubleArch, NotFound, NoSection
from .geom import EPS_GEOM, ConvexPolygon2, Polyhedron, RigidMotion, Rotation, contains_strict, project, shadow
from .polygon import DoubleArchDecomposition, double_arch_decompose, normalize_to_chord
from .sections import (
    OrientationKind,
    PolygonalSection,
    PrismSection,
    candidate_orientations,
    find_polygonal_section,
    find_prism_section,
)
from .sphere import POLE_GUARD, BaseVertex, Branch, f_curve_axis

logger = logging.getLogger(__name__)

DEFAULT_LATITUDES = tuple(0.01 * 2.0**k for k in range(7, -1, -1))


class Theorem(str, enum.Enum):
    A = "A"
    B = "B"
    AUTO = "auto"


class CertificateKind(str, enum.Enum):
    RUPERT = "Rupert"
    REVERSE_RUPERT = "ReverseRupert"


class FailureStage(str, enum.Enum):
    NO_SECTION = "no-section"
    TRIVIAL_DOUBLE_ARCH = "trivial-double-arch"
    SEARCH_EXHAUSTED = "search-exhausted"

    @property
    def rank(self) -> int:
        return list(FailureStage).index(self)


class SearchConfig(BaseModel):
    """Knobs of the constructive rotation search."""

    model_config = ConfigDict(frozen=True)

    delta0: float = Field(default=1e-2, gt=0, lt=math.pi)
    shrink: float = Field(default=0.5, gt=0, lt=1)
    max_retries: int = Field(default=40, ge=0)
    d_grid: tuple[float, ...] = DEFAULT_LATITUDES
    tolerance: float = Field(default=EPS_GEOM, gt=0)
    orientation_cap: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)

    @field_validator("d_grid")
    @classmethod
    def _open_latitudes(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        kept = tuple(d for d in value if POLE_GUARD < d < math.pi - POLE_GUARD)
        if not kept:
            raise ValueError("d_grid needs at least one latitude inside (0, pi)")
        return kept

    def deltas(self) -> Iterator[float]:
        for k in range(self.max_retries + 1):
            yield self.delta0 * self.shrink**k


class RotationCandidate(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float
    latitude: float
    branch: Branch
    rotation: Rotation


def _chord_vertex(P: ConvexPolygon2, eps: float) -> np.ndarray:
    """The chord endpoint on +x of a chord-normalized polygon."""
    on_axis = np.flatnonzero(np.abs(P.vertices[:, 1]) < eps)
    if len(on_axis) != 2:
        raise DegenerateInput("polygon is not normalized to a chord on the x-axis")
    ends = P.vertices[on_axis]
    right = ends[np.argmax(ends[:, 0])]
    return np.array([right[0], 0.0, 0.0])


def rupert_candidates(
    P: ConvexPolygon2, cfg: SearchConfig, delta_cap: float = math.pi
) -> Iterator[RotationCandidate]:
    """F-curve rotations in search order: delta shrinking, then latitude, then branch up before down."""
    base = BaseVertex(v=_chord_vertex(P, cfg.tolerance))
    for delta in cfg.deltas():
        if delta >= delta_cap:
            continue
        for d in cfg.d_grid:
            for branch in (Branch.UP, Branch.DOWN):
                axis = f_curve_axis(base, delta, d, branch)
                yield RotationCandidate(delta=delta, latitude=d, branch=branch, rotation=Rotation(axis=axis, angle=delta))


def polygon_margin(P: ConvexPolygon2, r: Rotation) -> float:
    """Margin of the rotated flat polygon's shadow inside the polygon itself."""
    return float(P.margins(project(r.apply(P.lift()))).min())


def rupert_rotation_for_polygon(P: ConvexPolygon2, cfg: SearchConfig | None = None) -> Rotation:
    cfg = cfg or SearchConfig()
    for candidate in rupert_candidates(P, cfg):
        if polygon_margin(P, candidate.rotation) > cfg.tolerance:
            return candidate.rotation
    raise NotFound(f"no rotation cleared {cfg.tolerance} after {cfg.max_retries} retries")


def _rupert_margin(Q: Polyhedron, r: Rotation, outer: ConvexPolygon2) -> float:
    return float(outer.margins(project(r.apply(Q.vertices))).min())


def verify_rupert(Q: Polyhedron, r: Rotation) -> float:
    """Containment margin of pi(r(Q)) in pi(Q); positive certifies a Rupert rotation.

    Taken over every projected vertex, which equals the margin of the hull.
    """
    return _rupert_margin(Q, r, shadow(Q, Rotation.identity()))


def verify_reverse(Q: Polyhedron, s: Rotation) -> float:
    """Containment margin of pi(Q) in pi(s(Q)); positive certifies a reverse Rupert rotation."""
    return float(shadow(Q, s).margins(project(Q.vertices)).min())


def _motion_document(motion: RigidMotion) -> dict[str, Any]:
    return {"matrix": motion.matrix.tolist(), "translation": motion.translation.tolist()}


def _motion_from_document(document: dict[str, Any]) -> RigidMotion:
    return RigidMotion(matrix=document["matrix"], translation=document["translation"])


class Certificate(BaseModel):
    """A verified passage: apply ``orientation`` to the input, then ``rotation``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: CertificateKind
    rotation: Rotation
    delta: float = Field(gt=0, lt=math.pi)
    margin: float = Field(gt=0)
    latitude: float
    branch: Branch
    orientation: RigidMotion
    section_witness: PolygonalSection | PrismSection
    decomposition_witness: DoubleArchDecomposition
    solid: str = ""

    @model_validator(mode="after")
    def _witnesses_agree(self) -> "Certificate":
        n = self.section_witness.polygon.n
        if self.decomposition_witness.size != n:
            raise ValueError(f"chord witness covers {self.decomposition_witness.size} vertices, the section has {n}")
        return self

    def to_document(self) -> dict[str, Any]:
        section = self.section_witness
        section_doc: dict[str, Any] = {
            "polygon": section.polygon.vertices.tolist(),
            "plane_motion": _motion_document(section.plane_motion),
        }
        if isinstance(section, PrismSection):
            section_doc.update(type="prism", h=section.h)
        else:
            section_doc.update(
                type="polygonal",
                planar_vertices=list(section.planar_vertices),
                off_plane_vertices=list(section.off_plane_vertices),
            )
        dec = self.decomposition_witness
        return {
            "solid": self.solid,
            "kind": self.kind.value,
            "delta": self.delta,
            "margin": self.margin,
            "latitude": self.latitude,
            "branch": self.branch.value,
            "rotation": {"axis": self.rotation.axis.tolist(), "angle": self.rotation.angle},
            "orientation": _motion_document(self.orientation),
            "section": section_doc,
            "chord": list(dec.chord),
            "upper": list(dec.upper),
            "lower": list(dec.lower),
        }

    @classmethod
    def from_document(cls, document: dict[str, Any]) -> "Certificate":
        section_doc = document["section"]
        polygon = ConvexPolygon2(vertices=section_doc["polygon"])
        plane_motion = _motion_from_document(section_doc["plane_motion"])
        if section_doc["type"] == "prism":
            section: PolygonalSection | PrismSection = PrismSection(
                polygon=polygon, h=section_doc["h"], plane_motion=plane_motion
            )
        else:
            section = PolygonalSection(
                polygon=polygon,
                plane_motion=plane_motion,
                planar_vertices=tuple(section_doc["planar_vertices"]),
                off_plane_vertices=tuple(section_doc["off_plane_vertices"]),
            )
        return cls(
            solid=document.get("solid", ""),
            kind=CertificateKind(document["kind"]),
            rotation=Rotation(axis=document["rotation"]["axis"], angle=document["rotation"]["angle"]),
            delta=document["delta"],
            margin=document["margin"],
            latitude=document["latitude"],
            branch=Branch(document["branch"]),
            orientation=_motion_from_document(document["orientation"]),
            section_witness=section,
            decomposition_witness=DoubleArchDecomposition(
                chord=tuple(document["chord"]), upper=tuple(document["upper"]), lower=tuple(document["lower"])
            ),
        )


class CertificationFailure(BaseModel):
    """Neither a proof nor a disproof: the theorem's construction did not apply."""

    model_config = ConfigDict(frozen=True)

    theorem: str
    stage: FailureStage
    detail: str = ""


def verify_certificate(Q: Polyhedron, certificate: Certificate | dict[str, Any]) -> float:
    """Recompute a certificate's margin from its orientation and rotation alone."""
    if isinstance(certificate, dict):
        certificate = Certificate.from_document(certificate)
    oriented = Q.transformed(certificate.orientation)
    if certificate.kind is CertificateKind.RUPERT:
        return verify_rupert(oriented, certificate.rotation)
    return verify_reverse(oriented, certificate.rotation)


class SectionCertifier(BaseModel):
    """Staged certification driver; subclasses supply the section and the verification.

    The run reports the furthest stage reached over every tried orientation
    when nothing certifies.
    """

    model_config = {"arbitrary_types_allowed": True}

    name: str
    theorem: Theorem
    kind: CertificateKind
    orientation_kind: OrientationKind
    config: SearchConfig = Field(default_factory=SearchConfig)

    def _find_section(self, oriented: Polyhedron, motion: RigidMotion) -> PolygonalSection | PrismSection:
        raise NotImplementedError

    def _delta_cap(self, section: PolygonalSection | PrismSection, flat: ConvexPolygon2) -> float:
        return math.pi

    def _margin(
        self, framed: Polyhedron, candidate: RotationCandidate, reference: ConvexPolygon2
    ) -> tuple[Rotation, float]:
        raise NotImplementedError

    def run(self, Q: Polyhedron, solid: str = "") -> Certificate | CertificationFailure:
        cfg = self.config
        label = solid or f"{Q.n}-vertex solid"
        logger.info(f"[{self.name}] Starting certification of {label}.")
        furthest = FailureStage.NO_SECTION
        detail = "no candidate orientation exposes a section"

        def reached(stage: FailureStage, why: str) -> None:
            nonlocal furthest, detail
            if stage.rank > furthest.rank:
                furthest, detail = stage, why

        motions = candidate_orientations(Q, cap=cfg.orientation_cap, kind=self.orientation_kind, seed=cfg.seed)
        for index, motion in enumerate(motions):
            oriented = Q.transformed(motion)

            # Step 1: find a section in this orientation
            try:
                section = self._find_section(oriented, motion)
            except NoSection as err:
                logger.debug(f"[{self.name}] Orientation {index}: no section ({err.reason}).")
                continue
            logger.info(f"[{self.name}] Orientation {index}: {section.polygon.n}-gon section found.")

            # Step 2: split the section polygon along a nontrivial chord
            try:
                dec = double_arch_decompose(section.polygon, cfg.tolerance)
            except NotDoubleArch as err:
                reached(FailureStage.TRIVIAL_DOUBLE_ARCH, str(err))
                continue
            if not dec.nontrivial:
                reached(FailureStage.TRIVIAL_DOUBLE_ARCH, f"{section.polygon.n}-gon section is only trivial double-arch")
                continue

            # Step 3: put the chord on the x-axis, centered at the origin
            flat, chord_motion = normalize_to_chord(section.polygon, dec)
            orientation = motion.then(chord_motion)
            framed = Q.transformed(orientation)
            reference = shadow(framed, Rotation.identity())

            # Step 4: walk the rotation schedule and verify on the whole solid
            for candidate in rupert_candidates(flat, cfg, self._delta_cap(section, flat)):
                rotation, margin = self._margin(framed, candidate, reference)
                if margin > cfg.tolerance:
                    logger.info(
                        f"[{self.name}] Certified {label}: delta={candidate.delta:.3g}, "
                        f"d={candidate.latitude:.3g}, branch={candidate.branch.value}, margin={margin:.3g}."
                    )
                    return Certificate(
                        solid=solid,
                        kind=self.kind,
                        rotation=rotation,
                        delta=candidate.delta,
                        margin=margin,
                        latitude=candidate.latitude,
                        branch=candidate.branch,
                        orientation=orientation,
                        section_witness=section,
                        decomposition_witness=dec,
                    )
            reached(FailureStage.SEARCH_EXHAUSTED, f"orientation {index}: schedule exhausted")

        logger.warning(f"[{self.name}] {label} not certified: {furthest.value} ({detail}).")
        return CertificationFailure(theorem=self.theorem.value, stage=furthest, detail=detail)


class PolygonalSectionCertifier(SectionCertifier):
    """Local Rupert passage from a nontrivial double-arch polygonal section."""

    name: str = "theorem_A"
    theorem: Theorem = Theorem.A
    kind: CertificateKind = CertificateKind.RUPERT
    orientation_kind: OrientationKind = "plane"

    @override
    def _find_section(self, oriented: Polyhedron, motion: RigidMotion) -> PolygonalSection:
        return find_polygonal_section(oriented, self.config.tolerance, motion)

    @override
    def _margin(
        self, framed: Polyhedron, candidate: RotationCandidate, reference: ConvexPolygon2
    ) -> tuple[Rotation, float]:
        # same arithmetic as verify_rupert, with the identity shadow computed once
        return candidate.rotation, _rupert_margin(framed, candidate.rotation, reference)


class PrismSectionCertifier(SectionCertifier):
    """Local reverse Rupert passage from a prism section over a nontrivial double-arch polygon."""

    name: str = "theorem_B"
    theorem: Theorem = Theorem.B
    kind: CertificateKind = CertificateKind.REVERSE_RUPERT
    orientation_kind: OrientationKind = "axis"

    @override
    def _find_section(self, oriented: Polyhedron, motion: RigidMotion) -> PrismSection:
        return find_prism_section(oriented, self.config.tolerance, motion)

    @override
    def _delta_cap(self, section: PrismSection, flat: ConvexPolygon2) -> float:
        # a rotation by delta moves a section vertex at most delta * radius
        return section.h / (2.0 * float(np.linalg.norm(flat.vertices, axis=1).max()))

    @override
    def _margin(
        self, framed: Polyhedron, candidate: RotationCandidate, reference: ConvexPolygon2
    ) -> tuple[Rotation, float]:
        sigma = candidate.rotation.inverse()
        return sigma, verify_reverse(framed, sigma)


def certify_theorem_A(Q: Polyhedron, cfg: SearchConfig | None = None, solid: str = "") -> Certificate | CertificationFailure:
    return PolygonalSectionCertifier(config=cfg or SearchConfig()).run(Q, solid)


def certify_theorem_B(Q: Polyhedron, cfg: SearchConfig | None = None, solid: str = "") -> Certificate | CertificationFailure:
    return PrismSectionCertifier(config=cfg or SearchConfig()).run(Q, solid)


def certify(
    Q: Polyhedron, cfg: SearchConfig | None = None, theorem: Theorem = Theorem.AUTO, solid: str = ""
) -> Certificate | CertificationFailure:
    """Run Theorem A, Theorem B, or A then B; on failure report the furthest stage reached."""
    theorem = Theorem(theorem)
    if theorem is Theorem.A:
        return certify_theorem_A(Q, cfg, solid)
    if theorem is Theorem.B:
        return certify_theorem_B(Q, cfg, solid)
    first = certify_theorem_A(Q, cfg, solid)
    if isinstance(first, Certificate):
        return first
    second = certify_theorem_B(Q, cfg, solid)
    if isinstance(second, Certificate) or second.stage.rank > first.stage.rank:
        return second
    return first


def cell_axes(base: BaseVertex, latitudes: np.ndarray, longitudes: np.ndarray) -> np.ndarray:
    """Unit axes at every (d, beta) pair, shaped ``(len(latitudes), len(longitudes), 3)``."""
    e, u, n = base.frame()
    d = latitudes[:, None, None]
    beta = longitudes[None, :, None]
    return np.cos(d) * e + np.sin(d) * (np.cos(beta) * u + np.sin(beta) * n)


def _rotated_images(axes: np.ndarray, v: np.ndarray, delta: float) -> np.ndarray:
    """Rodrigues rotation of ``v`` about many unit axes at once."""
    along = axes @ v
    return (
        v * math.cos(delta)
        + np.cross(axes, v) * math.sin(delta)
        + axes * along[..., None] * (1.0 - math.cos(delta))
    )


class AllowableGrid(BaseModel):
    """Membership of (d, beta) cell centers in the allowable axis set of one vertex."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: BaseVertex
    delta: float
    latitudes: np.ndarray
    longitudes: np.ndarray
    allowable: np.ndarray

    def axes(self) -> np.ndarray:
        return cell_axes(self.base, self.latitudes, self.longitudes)

    @property
    def fraction(self) -> float:
        return float(self.allowable.mean())


def allowable_set_sample(P: ConvexPolygon2, vertex_index: int, delta: float, resolution: int = 64) -> AllowableGrid:
    """Sample the allowable axes of a polygon vertex over the whole sphere.

    Cells are centered on a ``resolution`` x ``resolution`` grid in (d, beta);
    a cell is allowable when rotating the vertex by ``delta`` about its axis
    lands strictly inside the polygon.
    """
    if not 0 <= vertex_index < P.n:
        raise IndexError(f"vertex index {vertex_index} out of range for a {P.n}-gon")
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    base = BaseVertex(v=P.lift()[vertex_index])
    latitudes = (np.arange(resolution) + 0.5) * math.pi / resolution
    longitudes = (np.arange(resolution) + 0.5) * 2.0 * math.pi / resolution
    images = _rotated_images(cell_axes(base, latitudes, longitudes), base.v, delta)
    margins = P.margins(project(images).reshape(-1, 2)).reshape(resolution, resolution)
    return AllowableGrid(
        base=base, delta=delta, latitudes=latitudes, longitudes=longitudes, allowable=margins > 0
    )


def is_allowable(P: ConvexPolygon2, vertex_index: int, axis, delta: float) -> bool:
    v = P.lift()[vertex_index]
    return contains_strict(P, project(Rotation(axis=axis, angle=delta).apply(v))) > 0
