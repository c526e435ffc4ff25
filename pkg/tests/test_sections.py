"""Tests for polygonal sections, prism sections and the orientation heuristic."""
import math

import numpy as np
import pytest

from conftest import random_polyhedron
from local_rupert.catalog import build, dualize, signed_permutations
from local_rupert.errors import EmptySlice, NoSection
from local_rupert.geom import Polyhedron, RigidMotion, Rotation, shadow
from local_rupert.polygon import double_arch_decompose
from local_rupert.sections import (
    candidate_axes,
    candidate_orientations,
    cross_section,
    face_count,
    find_polygonal_section,
    find_prism_section,
    same_polygon,
    vertex_planes,
)


def lifted(Q: Polyhedron, dz: float) -> Polyhedron:
    return Q.transformed(RigidMotion(matrix=np.eye(3), translation=(0.0, 0.0, dz)))


class TestPolygonalSection:
    def test_octahedron_equator(self, octahedron):
        section = find_polygonal_section(octahedron)
        assert section.polygon.n == 4
        assert section.polygon.area == pytest.approx(2.0)
        assert len(section.off_plane_vertices) == 2
        assert sorted(section.planar_vertices + section.off_plane_vertices) == list(range(6))

    def test_section_is_the_shadow(self, octahedron):
        section = find_polygonal_section(octahedron)
        assert same_polygon(section.polygon, shadow(octahedron, Rotation.identity()))

    def test_planar_vertices_follow_polygon_order(self, octahedron):
        section = find_polygonal_section(octahedron)
        np.testing.assert_array_equal(
            octahedron.vertices[list(section.planar_vertices), :2], section.polygon.vertices
        )

    def test_cube_has_no_planar_vertices(self, cube):
        with pytest.raises(NoSection) as info:
            find_polygonal_section(cube)
        assert info.value.reason == "too-few-planar-vertices"

    @pytest.mark.parametrize("n", [4, 5, 8])
    def test_bipyramid_equator(self, n):
        section = find_polygonal_section(build("bipyramid", n=n))
        assert section.polygon.n == n

    def test_off_plane_vertex_outside(self):
        Q = Polyhedron(vertices=[(1, 0, 0), (-1, 1, 0), (-1, -1, 0), (3, 0, 1)])
        with pytest.raises(NoSection) as info:
            find_polygonal_section(Q)
        assert info.value.reason == "off-plane-vertex-outside"

    def test_no_cube_plane_gives_a_section(self, cube):
        for motion in candidate_orientations(cube, kind="plane"):
            with pytest.raises(NoSection):
                find_polygonal_section(cube.transformed(motion))


class TestPrismSection:
    def test_cube(self, cube):
        section = find_prism_section(cube)
        assert section.h == pytest.approx(1.0)
        assert section.polygon.n == 4
        assert section.polygon.area == pytest.approx(4.0)

    @pytest.mark.parametrize("n", [5, 6, 9])
    def test_prism_half_height(self, n):
        section = find_prism_section(build("prism", n=n, height=0.7))
        assert section.h == pytest.approx(0.7)
        assert section.polygon.n == n

    def test_octahedron_vertex_on_mid_plane(self, octahedron):
        with pytest.raises(NoSection) as info:
            find_prism_section(octahedron)
        assert info.value.reason == "vertex-on-mid-plane"

    def test_lifted_octahedron_slices_change(self, octahedron):
        with pytest.raises(NoSection) as info:
            find_prism_section(lifted(octahedron, 0.5))
        assert info.value.reason == "slice-mismatch"

    def test_mid_plane_above_solid(self, cube):
        with pytest.raises(NoSection) as info:
            find_prism_section(lifted(cube, 3.0))
        assert info.value.reason == "empty-mid-slice"

    def test_invariant_under_z_rotation(self, cube):
        turned = cube.transformed(RigidMotion.planar(0.3, (0.2, -0.1)))
        section = find_prism_section(turned)
        assert section.h == pytest.approx(1.0)
        assert section.polygon.area == pytest.approx(4.0)

    def test_prism_section_is_the_shadow(self, cube):
        assert same_polygon(find_prism_section(cube).polygon, shadow(cube, Rotation.identity()))


class TestCrossSection:
    def test_cube_middle(self, cube):
        assert cross_section(cube, 0.0).area == pytest.approx(4.0)

    def test_octahedron_halfway(self, octahedron):
        poly = cross_section(octahedron, 0.5)
        assert poly.n == 4
        assert poly.area == pytest.approx(0.5)

    @pytest.mark.parametrize("z0", [1.0, 2.0, -1.5])
    def test_plane_missing_interior(self, octahedron, z0):
        with pytest.raises(EmptySlice):
            cross_section(octahedron, z0)

    def test_slice_lies_in_solid(self, rng):
        for _ in range(30):
            Q = random_polyhedron(rng, 20)
            z0 = rng.uniform(-0.1, 0.1)
            poly = cross_section(Q, z0)
            points = np.column_stack([poly.vertices, np.full(poly.n, z0)])
            normals, offsets = Q.face_planes()
            assert np.all(points @ normals.T - offsets <= 1e-9)


class TestCandidates:
    def test_identity_first(self, cube):
        for kind in ("all", "plane", "axis"):
            motions = candidate_orientations(cube, kind=kind)
            np.testing.assert_array_equal(motions[0].matrix, np.eye(3))

    def test_cap(self, cube):
        assert len(candidate_orientations(cube, cap=3)) == 3

    def test_octahedron_coordinate_planes_lead(self, octahedron):
        planes = vertex_planes(octahedron)
        assert [count for _, _, count in planes[:3]] == [4, 4, 4]
        assert all(offset == pytest.approx(0.0, abs=1e-12) for _, offset, _ in planes[:3])

    def test_cube_axes_include_symmetry_axes(self, cube):
        axes = np.array(candidate_axes(cube))
        for target in ((1.0, 0.0, 0.0), np.ones(3) / math.sqrt(3.0)):
            assert np.max(np.abs(axes @ np.asarray(target))) == pytest.approx(1.0)

    def test_rhombic_dodecahedron_prism_axis_is_threefold(self):
        raw = dualize(Polyhedron(vertices=signed_permutations((1.0, 1.0, 0.0))))
        found = []
        for motion in candidate_orientations(raw, kind="axis"):
            try:
                section = find_prism_section(raw.transformed(motion))
            except NoSection:
                continue
            if double_arch_decompose(section.polygon).nontrivial:
                found.append(motion)
        assert found
        for motion in found:
            np.testing.assert_allclose(np.abs(motion.matrix[2]), 1.0 / math.sqrt(3.0), atol=1e-9)

    def test_face_counts(self, cube, octahedron):
        assert face_count(cube) == 6
        assert face_count(octahedron) == 8

    def test_large_mesh_stays_within_the_cap(self, rng):
        points = rng.normal(size=(500, 3))
        Q = Polyhedron(vertices=points / np.linalg.norm(points, axis=1, keepdims=True))
        assert Q.n == 500
        assert len(candidate_orientations(Q, cap=10)) == 10
        assert len(vertex_planes(Q, limit=25)) == 25

    def test_triple_sampling_is_seeded(self, rng):
        points = rng.normal(size=(40, 3))
        Q = Polyhedron(vertices=points / np.linalg.norm(points, axis=1, keepdims=True))
        sampled = vertex_planes(Q, max_triples=1000, seed=7)
        again = vertex_planes(Q, max_triples=1000, seed=7)
        assert 0 < len(sampled) <= 1000 < len(vertex_planes(Q))
        np.testing.assert_array_equal([normal for normal, _, _ in sampled], [normal for normal, _, _ in again])
