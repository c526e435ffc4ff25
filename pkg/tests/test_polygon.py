"""Tests for double-arch chords and chord normalization."""
import itertools
import math

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import random_polygon
from local_rupert.errors import BadParameters
from local_rupert.geom import ConvexPolygon2
from local_rupert.polygon import (
    DoubleArchDecomposition,
    chord_pairs,
    double_arch_decompose,
    flipped_right_triangle,
    is_double_arch_chord,
    normalize_to_chord,
    regular_polygon,
)


class TestDecompose:
    def test_square_uses_a_diagonal(self, square):
        dec = double_arch_decompose(square)
        assert dec.chord == (0, 2)
        assert dec.upper == (3,)
        assert dec.lower == (1,)
        assert dec.nontrivial

    def test_triangle_is_trivial(self):
        triangle = ConvexPolygon2(vertices=[(0, 0), (1, 0), (0, 1)])
        dec = double_arch_decompose(triangle)
        assert not dec.nontrivial
        assert dec.chord == (1, 2)

    @pytest.mark.parametrize("n", range(4, 13))
    def test_regular_polygons_are_nontrivial(self, n):
        assert double_arch_decompose(regular_polygon(n)).nontrivial

    def test_constructed_quadrilateral_has_only_trivial_chords(self):
        P = flipped_right_triangle()
        assert P.n == 4
        assert np.min(np.linalg.norm(P.vertices - (1.2, -0.6), axis=1)) < 1e-12
        for i, j in itertools.combinations(range(P.n), 2):
            if (j - i) % P.n in (1, P.n - 1):
                continue
            assert not is_double_arch_chord(P, i, j)
        assert not double_arch_decompose(P).nontrivial

    def test_every_convex_polygon_decomposes(self, rng):
        for _ in range(500):
            P = random_polygon(rng, int(rng.integers(3, 16)))
            dec = double_arch_decompose(P)
            assert len(dec.upper) + len(dec.lower) == P.n - 2

    def test_chord_pairs_longest_first(self, square):
        pairs = chord_pairs(square)
        assert pairs[:2] == [(0, 2), (1, 3)]
        assert len(pairs) == 6

    def test_same_vertex_is_not_a_chord(self, square):
        assert not is_double_arch_chord(square, 1, 1)


class TestNormalize:
    def test_chord_lands_on_x_axis(self):
        P = ConvexPolygon2(vertices=[(1, 0), (2, 1), (1, 2), (0, 1)])
        dec = double_arch_decompose(P)
        assert dec.chord == (0, 2)
        normalized, _ = normalize_to_chord(P, dec)
        np.testing.assert_allclose(
            normalized.vertices, [(-1, 0), (0, -1), (1, 0), (0, 1)], atol=1e-12
        )

    def test_already_normalized_is_identity(self):
        P = ConvexPolygon2(vertices=[(-1, 0), (0, -1), (1, 0), (0, 1)])
        normalized, motion = normalize_to_chord(P, double_arch_decompose(P))
        np.testing.assert_allclose(motion.matrix, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(normalized.vertices, P.vertices, atol=1e-12)

    def test_upper_vertices_end_up_above(self, rng):
        for _ in range(200):
            P = random_polygon(rng, 9)
            dec = double_arch_decompose(P)
            normalized, _ = normalize_to_chord(P, dec)
            i, j = dec.chord
            assert normalized.vertices[i, 0] < 0 < normalized.vertices[j, 0]
            np.testing.assert_allclose(normalized.vertices[[i, j], 1], 0.0, atol=1e-12)
            assert np.all(normalized.vertices[list(dec.upper), 1] > 0)
            assert np.all(normalized.vertices[list(dec.lower), 1] < 0)

    def test_preserves_distances(self, rng):
        P = random_polygon(rng, 8)
        normalized, _ = normalize_to_chord(P, double_arch_decompose(P))
        before = np.linalg.norm(P.vertices[:, None] - P.vertices[None], axis=2)
        after = np.linalg.norm(normalized.vertices[:, None] - normalized.vertices[None], axis=2)
        np.testing.assert_allclose(after, before, atol=1e-12)


class TestConstructors:
    def test_regular_polygon_circumradius(self):
        P = regular_polygon(7, circumradius=2.5)
        np.testing.assert_allclose(np.linalg.norm(P.vertices, axis=1), 2.5)
        assert P.area == pytest.approx(0.5 * 7 * 2.5**2 * math.sin(2 * math.pi / 7))

    def test_regular_polygon_needs_three_vertices(self):
        with pytest.raises(BadParameters):
            regular_polygon(2)

    def test_constructed_quadrilateral_needs_unequal_legs(self):
        with pytest.raises(BadParameters):
            flipped_right_triangle(1.0, 1.0)


class TestDecompositionModel:
    def test_partition_accepted(self):
        dec = DoubleArchDecomposition(chord=(0, 2), upper=(3,), lower=(1,))
        assert dec.size == 4

    @pytest.mark.parametrize(
        "chord, upper, lower",
        [((0, 2), (1,), (1,)), ((0, 0), (1,), (2,)), ((0, 3), (1,), ()), ((0, 2), (3,), (-1,))],
    )
    def test_overlap_or_gap_rejected(self, chord, upper, lower):
        with pytest.raises(ValidationError):
            DoubleArchDecomposition(chord=chord, upper=upper, lower=lower)
