"""ASCII OFF mesh input and output."""
from pathlib import Path

import numpy as np

from .errors import MalformedOff
from .geom import Polyhedron


def _data_lines(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        content = line.split("#", 1)[0].strip()
        if content:
            rows.append(content.split())
    return rows


def parse_off(text: str) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Vertices ``(n, 3)`` and faces (vertex index tuples) of an OFF document.

    The counts may follow the ``OFF`` keyword on the header line or sit on
    the next line; the edge count is ignored.
    """
    rows = _data_lines(text)
    if not rows or not rows[0][0].upper().endswith("OFF"):
        raise MalformedOff("not a valid OFF header")
    counts = rows[0][1:] or (rows[1] if len(rows) > 1 else [])
    body = rows[1:] if rows[0][1:] else rows[2:]
    try:
        n_verts, n_faces = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise MalformedOff("missing vertex/face counts") from None
    if n_verts < 0 or n_faces < 0 or len(body) < n_verts + n_faces:
        raise MalformedOff(f"expected {n_verts} vertex and {n_faces} face lines, found {len(body)} lines")
    try:
        vertices = np.array([[float(x) for x in row[:3]] for row in body[:n_verts]], dtype=float)
    except ValueError as err:
        raise MalformedOff(f"bad vertex line: {err}") from None
    if vertices.shape != (n_verts, 3) or not np.all(np.isfinite(vertices)):
        raise MalformedOff("every vertex line needs three finite coordinates")
    faces = []
    for row in body[n_verts : n_verts + n_faces]:
        try:
            size = int(row[0])
            face = tuple(int(x) for x in row[1 : 1 + size])
        except (IndexError, ValueError):
            raise MalformedOff(f"bad face line: {' '.join(row)}") from None
        if len(face) != size or size < 3 or any(not 0 <= k < n_verts for k in face):
            raise MalformedOff(f"face {face} is malformed or indexes past {n_verts} vertices")
        faces.append(face)
    return vertices, faces


def format_off(vertices, faces=()) -> str:
    """OFF text using ``repr`` floats, so parsing it back is exact."""
    vertices = np.asarray(vertices, dtype=float)
    lines = ["OFF", f"{len(vertices)} {len(faces)} 0"]
    lines += [" ".join(repr(float(x)) for x in vertex) for vertex in vertices]
    lines += [" ".join(str(k) for k in (len(face), *face)) for face in faces]
    return "\n".join(lines) + "\n"


def read_off(path: str | Path) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    return parse_off(Path(path).read_text())


def write_off(path: str | Path, vertices, faces=()) -> None:
    Path(path).write_text(format_off(vertices, faces))


def load_polyhedron(path: str | Path) -> Polyhedron:
    """Read an OFF file as a convex polyhedron; every listed vertex must be extreme."""
    vertices, _ = read_off(path)
    return Polyhedron(vertices=vertices)
