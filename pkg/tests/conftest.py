import numpy as np
import pytest
from hypothesis import settings
from scipy.spatial import ConvexHull

from local_rupert.catalog import build
from local_rupert.geom import ConvexPolygon2, Polyhedron

settings.register_profile("geometry", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("geometry")


@pytest.fixture
def rng():
    return np.random.default_rng(1729)


@pytest.fixture
def square():
    return ConvexPolygon2(vertices=[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


@pytest.fixture
def cube():
    return build("cube")


@pytest.fixture
def octahedron():
    return build("octahedron")


def random_polyhedron(rng, n: int = 12) -> Polyhedron:
    """Hull vertices of random points on a lumpy sphere."""
    points = rng.normal(size=(n, 3))
    points *= (rng.uniform(0.7, 1.3, size=n) / np.linalg.norm(points, axis=1))[:, None]
    return Polyhedron(vertices=points[ConvexHull(points).vertices])


def random_polygon(rng, n: int = 8) -> ConvexPolygon2:
    from local_rupert.geom import hull2

    return hull2(rng.uniform(-1.0, 1.0, size=(max(n, 3), 2)))
