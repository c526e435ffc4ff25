"""Tests for OFF reading and writing."""
import numpy as np
import pytest

from local_rupert.errors import MalformedOff, NonConvexInput
from local_rupert.offio import format_off, load_polyhedron, parse_off, write_off

TETRA = """OFF
# a tetrahedron
4 4 6
1 1 1
1 -1 -1
-1 1 -1
-1 -1 1
3 0 1 2
3 0 3 1
3 0 2 3
3 1 3 2
"""


class TestParse:
    def test_tetrahedron(self):
        vertices, faces = parse_off(TETRA)
        assert vertices.shape == (4, 3)
        assert faces[0] == (0, 1, 2)
        assert len(faces) == 4

    def test_counts_on_header_line(self):
        vertices, faces = parse_off("OFF 4 0 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n")
        assert len(vertices) == 4
        assert faces == []

    def test_trailing_comments(self):
        vertices, _ = parse_off("OFF\n4 0 0\n0 0 0 # origin\n1 0 0\n0 1 0\n0 0 1\n")
        np.testing.assert_array_equal(vertices[0], (0.0, 0.0, 0.0))

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "PLY\n4 0 0\n",
            "OFF\n",
            "OFF\n4 0 0\n0 0 0\n1 0 0\n",
            "OFF\n2 0 0\n0 0\n1 0 0\n",
            "OFF\n2 0 0\n0 0 x\n1 0 0\n",
            "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n",
            "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MalformedOff):
            parse_off(text)


class TestWrite:
    def test_exact_round_trip(self, rng):
        vertices = rng.normal(size=(9, 3))
        again, faces = parse_off(format_off(vertices, [(0, 1, 2)]))
        np.testing.assert_array_equal(again, vertices)
        assert faces == [(0, 1, 2)]

    def test_load_written_cube(self, tmp_path, cube):
        path = tmp_path / "cube.off"
        write_off(path, cube.vertices)
        np.testing.assert_array_equal(load_polyhedron(path).vertices, cube.vertices)

    def test_interior_vertex_rejected(self, tmp_path, cube):
        path = tmp_path / "bad.off"
        write_off(path, np.vstack([cube.vertices, [[0.1, 0.0, 0.0]]]))
        with pytest.raises(NonConvexInput):
            load_polyhedron(path)
