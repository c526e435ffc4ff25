"""SVG figures: shadows, sections and allowable-axis atlases.

Drawing happens in model coordinates with y pointing up; ``Figure`` tracks
the bounds and flips y when the document is written.  Numbers are printed
with fixed precision so identical inputs give identical bytes.
"""
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .geom import ConvexPolygon2, Polyhedron, Rotation, project, shadow
from .passage import AllowableGrid
from .polygon import DoubleArchDecomposition
from .sections import PolygonalSection, PrismSection

SVG_NS = "http://www.w3.org/2000/svg"


def _num(x: float) -> str:
    text = f"{x:.6f}"
    return "0.000000" if text == "-0.000000" else text


class Figure:
    """Accumulates SVG shapes and the bounding box they need."""

    def __init__(self, pixel_width: int = 480):
        self.pixel_width = pixel_width
        self.min_x = self.max_x = self.min_y = self.max_y = None
        self.items: list[tuple[str, dict[str, str]]] = []

    def require(self, x: float, y: float) -> None:
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            self.min_x, self.max_x = min(self.min_x, x), max(self.max_x, x)
            self.min_y, self.max_y = min(self.min_y, y), max(self.max_y, y)

    def _points(self, points) -> str:
        pts = np.asarray(points, dtype=float)
        for x, y in pts:
            self.require(x, y)
        return " ".join(f"{_num(x)},{_num(-y)}" for x, y in pts)

    def polygon(self, points, stroke: str = "#000000", fill: str = "none", opacity: float = 1.0, width: float = 0.01):
        self.items.append(
            (
                "polygon",
                {
                    "points": self._points(points),
                    "fill": fill,
                    "fill-opacity": _num(opacity),
                    "stroke": stroke,
                    "stroke-width": _num(width),
                },
            )
        )

    def line(self, points, stroke: str = "#000000", width: float = 0.01, dash: str | None = None):
        attrs = {"points": self._points(points), "fill": "none", "stroke": stroke, "stroke-width": _num(width)}
        if dash:
            attrs["stroke-dasharray"] = dash
        self.items.append(("polyline", attrs))

    def circle(self, x: float, y: float, radius: float, stroke: str = "#000000", fill: str = "none", width: float = 0.01):
        self.require(x - radius, y - radius)
        self.require(x + radius, y + radius)
        self.items.append(
            (
                "circle",
                {"cx": _num(x), "cy": _num(-y), "r": _num(radius), "fill": fill, "stroke": stroke, "stroke-width": _num(width)},
            )
        )

    def element(self) -> ET.Element:
        if self.min_x is None:
            self.require(-1.0, -1.0)
            self.require(1.0, 1.0)
        span = max(self.max_x - self.min_x, self.max_y - self.min_y)
        pad = 0.05 * span
        width = self.max_x - self.min_x + 2 * pad
        height = self.max_y - self.min_y + 2 * pad
        root = ET.Element(
            "svg",
            xmlns=SVG_NS,
            version="1.1",
            width=f"{self.pixel_width}px",
            height=f"{round(self.pixel_width * height / width)}px",
            viewBox=f"{_num(self.min_x - pad)} {_num(-self.max_y - pad)} {_num(width)} {_num(height)}",
        )
        group = ET.SubElement(root, "g")
        for tag, attrs in self.items:
            ET.SubElement(group, tag, attrs)
        return root

    def to_string(self) -> str:
        return ET.tostring(self.element(), encoding="unicode") + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_string())


def shadow_figure(Q: Polyhedron, r: Rotation) -> Figure:
    """Identity shadow as an outline with the rotated shadow filled over it."""
    figure = Figure()
    moved = shadow(Q, r)
    figure.polygon(moved.vertices, stroke="#1f4e79", fill="#9dc3e6", opacity=0.6)
    figure.polygon(shadow(Q, Rotation.identity()).vertices, stroke="#000000", width=0.02)
    return figure


def section_figure(
    Q: Polyhedron,
    section: PolygonalSection | PrismSection,
    decomposition: DoubleArchDecomposition | None = None,
) -> Figure:
    """Section polygon, projected vertices, and the double-arch chord when known."""
    figure = Figure()
    polygon: ConvexPolygon2 = section.polygon
    figure.polygon(polygon.vertices, stroke="#000000", fill="#f4b183", opacity=0.5, width=0.02)
    span = float(np.ptp(polygon.vertices, axis=0).max())
    for x, y in project(Q.vertices):
        figure.circle(x, y, 0.012 * span, stroke="#404040", fill="#404040")
    if decomposition is not None:
        i, j = decomposition.chord
        figure.line(polygon.vertices[[i, j]], stroke="#c00000", width=0.015, dash="0.04,0.02")
    return figure


def allowable_figure(grid: AllowableGrid) -> Figure:
    """Orthographic view of the sphere with the base vertex facing the viewer.

    Screen x runs along the meridian direction and screen y toward the
    positive pole; only cells on the near hemisphere are drawn.
    """
    figure = Figure()
    radius = grid.base.radius
    figure.circle(0.0, 0.0, radius, stroke="#000000", width=0.01 * radius)
    e, u, n = grid.base.frame()
    d_step = grid.latitudes[1] - grid.latitudes[0]
    b_step = grid.longitudes[1] - grid.longitudes[0]
    for i, j in zip(*np.nonzero(grid.allowable)):
        d, beta = grid.latitudes[i], grid.longitudes[j]
        if d >= math.pi / 2:
            continue
        corners = []
        for dd, bb in ((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)):
            cd, cb = d + dd * d_step, beta + bb * b_step
            point = math.cos(cd) * e + math.sin(cd) * (math.cos(cb) * u + math.sin(cb) * n)
            corners.append((radius * float(point @ u), radius * float(point @ n)))
        figure.polygon(corners, stroke="none", fill="#548235", opacity=0.8, width=0.0)
    figure.circle(0.0, 0.0, 0.02 * radius, stroke="#c00000", fill="#c00000")
    return figure
