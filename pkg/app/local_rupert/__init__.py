"""Local Rupert and local reverse Rupert certification for convex polyhedra."""
from .catalog import SolidSpec, build, survey_set
from .geom import ConvexPolygon2, Polyhedron, Rotation, contains_strict, hull2, project, rotate, shadow
from .passage import Certificate, CertificationFailure, SearchConfig, certify, verify_certificate

__all__ = [
    "Certificate",
    "CertificationFailure",
    "ConvexPolygon2",
    "Polyhedron",
    "Rotation",
    "SearchConfig",
    "SolidSpec",
    "build",
    "certify",
    "contains_strict",
    "hull2",
    "project",
    "rotate",
    "shadow",
    "survey_set",
    "verify_certificate",
]
