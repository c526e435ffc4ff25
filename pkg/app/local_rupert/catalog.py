"""Vertex builders for the surveyed solids and the prism/bipyramid families.

Raw coordinates come from the usual constructions (signed permutations, golden
ratio coordinates, polar duals).  Solids expected to certify are then turned
into an orientation that exposes their section, found once by the section
search and cached.
"""
import enum
import functools
import itertools
import logging
import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import BadParameters, NoSection, NotDoubleArch, UnknownSolid
from .geom import Polyhedron, RigidMotion
from .polygon import double_arch_decompose
from .sections import candidate_orientations, find_polygonal_section, find_prism_section

logger = logging.getLogger(__name__)

PHI = (1.0 + math.sqrt(5.0)) / 2.0
SQRT2 = math.sqrt(2.0)


class Expected(str, enum.Enum):
    RUPERT_VIA_A = "RupertViaA"
    REVERSE_VIA_B = "ReverseViaB"
    NOT_COVERED = "NotCovered"


def _unique_rows(points: np.ndarray) -> np.ndarray:
    _, first = np.unique(np.round(points, 9), axis=0, return_index=True)
    return points[np.sort(first)]


def signed_permutations(base, even_only: bool = False) -> np.ndarray:
    """All sign changes of all (or only cyclic) coordinate permutations of ``base``."""
    if even_only:
        orders = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    else:
        orders = list(itertools.permutations(range(3)))
    rows = []
    for order in orders:
        for signs in itertools.product((1.0, -1.0), repeat=3):
            rows.append([signs[k] * base[order[k]] for k in range(3)])
    return _unique_rows(np.array(rows, dtype=float))


def _even(*bases) -> np.ndarray:
    return _unique_rows(np.concatenate([signed_permutations(b, even_only=True) for b in bases]))


def dualize(Q: Polyhedron) -> Polyhedron:
    """Polar dual about the origin: one vertex per face plane, at the plane's pole."""
    normals, offsets = Q.face_planes()
    return Polyhedron(vertices=normals / offsets[:, None])


def _regular_ring(n: int, z: float, phase: float = 0.0) -> np.ndarray:
    angles = phase + 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([np.cos(angles), np.sin(angles), np.full(n, z)])


def _family_size(n: int | None, name: str) -> int:
    if n is None or n < 3:
        raise BadParameters(f"{name} needs n >= 3, got {n}")
    return n


def prism(n: int, h: float = 1.0) -> np.ndarray:
    if h <= 0:
        raise BadParameters("prism half-height must be positive")
    return np.concatenate([_regular_ring(n, h), _regular_ring(n, -h)])


def bipyramid(n: int) -> np.ndarray:
    return np.concatenate([_regular_ring(n, 0.0), [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]])


def antiprism(n: int) -> np.ndarray:
    # equal edges on a unit circumcircle
    h = 0.5 * math.sqrt(4.0 * math.sin(math.pi / n) ** 2 - 2.0 + 2.0 * math.cos(math.pi / n))
    return np.concatenate([_regular_ring(n, h), _regular_ring(n, -h, phase=math.pi / n)])


def _icosahedron() -> np.ndarray:
    return _even((0.0, 1.0, PHI))


def _icosidodecahedron() -> np.ndarray:
    ico = _icosahedron()
    gaps = np.linalg.norm(ico[:, None] - ico[None, :], axis=2)
    i, j = np.nonzero(np.triu(np.isclose(gaps, 2.0)))
    return (ico[i] + ico[j]) / 2.0


def _elongated_square_gyrobicupola() -> np.ndarray:
    a, b = 0.5, (1.0 + SQRT2) / 2.0
    ring = np.array([[x, y] for x, y in [(a, b), (-a, b), (-b, a), (-b, -a), (-a, -b), (a, -b), (b, -a), (b, a)]])
    top_z, bottom_z = 0.5 + 1.0 / SQRT2, -0.5 - 1.0 / SQRT2
    r = 1.0 / SQRT2
    return np.concatenate(
        [
            np.column_stack([ring, np.full(8, 0.5)]),
            np.column_stack([ring, np.full(8, -0.5)]),
            [[0.5, 0.5, top_z], [-0.5, 0.5, top_z], [-0.5, -0.5, top_z], [0.5, -0.5, top_z]],
            [[r, 0.0, bottom_z], [0.0, r, bottom_z], [-r, 0.0, bottom_z], [0.0, -r, bottom_z]],
        ]
    )


def _dual_of(builder: Callable[[], np.ndarray]) -> Callable[[], np.ndarray]:
    return lambda: dualize(Polyhedron(vertices=builder())).vertices


_FIXED: dict[str, Callable[[], np.ndarray]] = {
    "tetrahedron": lambda: np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]),
    "cube": lambda: signed_permutations((1.0, 1.0, 1.0)),
    "octahedron": lambda: signed_permutations((1.0, 0.0, 0.0)),
    "dodecahedron": lambda: np.concatenate([signed_permutations((1.0, 1.0, 1.0)), _even((0.0, 1.0 / PHI, PHI))]),
    "icosahedron": _icosahedron,
    "cuboctahedron": lambda: signed_permutations((1.0, 1.0, 0.0)),
    "icosidodecahedron": _icosidodecahedron,
    "truncated_cube": lambda: signed_permutations((SQRT2 - 1.0, 1.0, 1.0)),
    "truncated_octahedron": lambda: signed_permutations((0.0, 1.0, 2.0)),
    "rhombicuboctahedron": lambda: signed_permutations((1.0, 1.0, 1.0 + SQRT2)),
    "truncated_cuboctahedron": lambda: signed_permutations((1.0, 1.0 + SQRT2, 1.0 + 2.0 * SQRT2)),
    "rhombicosidodecahedron": lambda: _even((1.0, 1.0, PHI**3), (PHI**2, PHI, 2.0 * PHI), (2.0 + PHI, 0.0, PHI**2)),
    "truncated_icosidodecahedron": lambda: _even(
        (1.0 / PHI, 1.0 / PHI, 3.0 + PHI),
        (2.0 / PHI, PHI, 1.0 + 2.0 * PHI),
        (1.0 / PHI, PHI**2, 3.0 * PHI - 1.0),
        (2.0 * PHI - 1.0, 2.0, 2.0 + PHI),
        (PHI, 3.0, 2.0 * PHI),
    ),
    "elongated_square_gyrobicupola": _elongated_square_gyrobicupola,
}
_FIXED.update(
    {
        "rhombic_dodecahedron": _dual_of(_FIXED["cuboctahedron"]),
        "rhombic_triacontahedron": _dual_of(_FIXED["icosidodecahedron"]),
        "triakis_octahedron": _dual_of(_FIXED["truncated_cube"]),
        "triakis_hexahedron": _dual_of(_FIXED["truncated_octahedron"]),
        "deltoidal_icositetrahedron": _dual_of(_FIXED["rhombicuboctahedron"]),
        "disdyakis_dodecahedron": _dual_of(_FIXED["truncated_cuboctahedron"]),
        "disdyakis_triacontahedron": _dual_of(_FIXED["truncated_icosidodecahedron"]),
    }
)

_FAMILIES = ("prism", "bipyramid", "antiprism", "trapezohedron")

# Dual pairs of the catalog: (solid, dual).
DUAL_PAIRS = (
    ("octahedron", "cube"),
    ("cuboctahedron", "rhombic_dodecahedron"),
    ("icosidodecahedron", "rhombic_triacontahedron"),
)

_EXPECTED = {
    **dict.fromkeys(
        [
            "octahedron",
            "cuboctahedron",
            "icosidodecahedron",
            "triakis_octahedron",
            "triakis_hexahedron",
            "deltoidal_icositetrahedron",
            "disdyakis_dodecahedron",
            "disdyakis_triacontahedron",
        ],
        Expected.RUPERT_VIA_A,
    ),
    **dict.fromkeys(
        [
            "cube",
            "truncated_cube",
            "truncated_octahedron",
            "rhombicuboctahedron",
            "truncated_cuboctahedron",
            "truncated_icosidodecahedron",
            "rhombic_dodecahedron",
            "rhombic_triacontahedron",
            "elongated_square_gyrobicupola",
        ],
        Expected.REVERSE_VIA_B,
    ),
}


def known_solids() -> list[str]:
    return sorted(_FIXED) + list(_FAMILIES)


def expected_outcome(name: str, n: int | None = None) -> Expected:
    if name == "prism":
        return Expected.REVERSE_VIA_B if n and n >= 4 else Expected.NOT_COVERED
    if name == "bipyramid":
        return Expected.RUPERT_VIA_A if n and n >= 4 else Expected.NOT_COVERED
    return _EXPECTED.get(name, Expected.NOT_COVERED)


class SolidSpec(BaseModel):
    """A named solid, its family parameters, and the outcome the survey expects."""

    model_config = ConfigDict(frozen=True)

    name: str
    n: int | None = None
    height: float | None = None
    expected: Expected | None = None

    @model_validator(mode="before")
    @classmethod
    def _resolve(cls, data):
        if isinstance(data, dict):
            name = str(data.get("name", "")).strip().lower().replace("-", "_").replace(" ", "_")
            if name not in _FIXED and name not in _FAMILIES:
                raise UnknownSolid(f"unknown solid {data.get('name')!r}")
            data = {**data, "name": name}
            if name in _FAMILIES:
                _family_size(data.get("n"), name)
            if data.get("expected") is None:
                data["expected"] = expected_outcome(name, data.get("n"))
        return data

    @property
    def label(self) -> str:
        return self.name if self.n is None else f"{self.name}-{self.n}"


def _raw_vertices(spec: SolidSpec) -> np.ndarray:
    if spec.name == "prism":
        return prism(spec.n, spec.height if spec.height is not None else 1.0)
    if spec.name == "bipyramid":
        return bipyramid(spec.n)
    if spec.name == "antiprism":
        return antiprism(spec.n)
    if spec.name == "trapezohedron":
        return dualize(Polyhedron(vertices=antiprism(spec.n))).vertices
    return _FIXED[spec.name]()


def canonical_orientation(Q: Polyhedron, expected: Expected) -> RigidMotion | None:
    """First candidate orientation exposing the section the expected theorem needs, if any."""
    if expected is Expected.NOT_COVERED:
        return None
    if expected is Expected.RUPERT_VIA_A:
        kind, finder = "plane", find_polygonal_section
    else:
        kind, finder = "axis", find_prism_section
    for motion in candidate_orientations(Q, kind=kind):
        try:
            section = finder(Q.transformed(motion))
            if double_arch_decompose(section.polygon).nontrivial:
                return motion
        except (NoSection, NotDoubleArch):
            continue
    logger.warning(f"[catalog] No orientation exposes a {kind} section; keeping raw coordinates.")
    return None


@functools.lru_cache(maxsize=None)
def _build_cached(spec: SolidSpec) -> Polyhedron:
    raw = Polyhedron(vertices=_raw_vertices(spec))
    motion = canonical_orientation(raw, spec.expected)
    if motion is None:
        return raw
    logger.info(f"[catalog] Reoriented {spec.label} to expose its section.")
    return Polyhedron(vertices=motion.apply(raw.vertices))


def build(spec: SolidSpec | str, n: int | None = None, height: float | None = None) -> Polyhedron:
    if isinstance(spec, str):
        spec = SolidSpec(name=spec, n=n, height=height)
    return _build_cached(spec)


def survey_set(include_gyrobicupola: bool = False, family_range: range = range(4, 11)) -> list[SolidSpec]:
    names = [
        "octahedron",
        "cuboctahedron",
        "icosidodecahedron",
        "triakis_octahedron",
        "triakis_hexahedron",
        "deltoidal_icositetrahedron",
        "disdyakis_dodecahedron",
        "disdyakis_triacontahedron",
        "cube",
        "truncated_cube",
        "truncated_octahedron",
        "rhombicuboctahedron",
        "truncated_cuboctahedron",
        "truncated_icosidodecahedron",
        "rhombic_dodecahedron",
        "rhombic_triacontahedron",
    ]
    if include_gyrobicupola:
        names.append("elongated_square_gyrobicupola")
    names += ["tetrahedron", "dodecahedron", "icosahedron", "rhombicosidodecahedron"]
    specs = [SolidSpec(name=name) for name in names]
    specs += [SolidSpec(name="prism", n=3), SolidSpec(name="bipyramid", n=3)]
    specs += [SolidSpec(name="prism", n=n) for n in family_range]
    specs += [SolidSpec(name="bipyramid", n=n) for n in family_range]
    return specs
