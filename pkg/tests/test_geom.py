import math

import numpy as np
import pytest
from conftest import leibniz_sign
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from emptystar.geom import (
    DegenerateSimplexError,
    DimensionMismatchError,
    GeneralPositionError,
    GeometryError,
    PointSet,
    convex_hull_2d,
    format_point_set,
    is_general_position,
    max_edge_length,
    orientation,
    orientation_signs,
    parse_point_set,
    point_in_open_simplex,
    simplex_volume,
)

coord = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_infinity=False)


def simplex_strategy(d):
    return st.lists(st.lists(coord, min_size=d, max_size=d), min_size=d + 1, max_size=d + 1)


class TestOrientation:
    def test_examples(self):
        assert orientation([(0, 0), (1, 0), (0, 1)]) == 1
        assert orientation([(0, 0), (1, 1), (2, 2)]) == 0
        assert orientation([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]) == 1

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            orientation([(0, 0), (1, 0), (0, 1)], dim=3)
        with pytest.raises(DimensionMismatchError):
            orientation([(0, 0), (1, 0)])

    def test_nearly_collinear_is_exact(self):
        # classic failure case of naive floating-point orientation
        for k in range(60):
            p = (0.5 + k * 2.0 ** -53, 0.5)
            pts = [p, (12.0, 12.0), (24.0, 24.0)]
            assert orientation(pts) == leibniz_sign(pts)

    def test_degenerate_3d_exact(self):
        pts = [(0.1, 0.2, 0.3), (0.4, 0.5, 0.6), (0.7, 0.8, 0.9), (1.0, 1.1, 1.2)]
        assert orientation(pts) == leibniz_sign(pts)

    def test_underflowing_products(self):
        # products of these coordinates fall below the smallest subnormal
        for pts in ([(0.0, 0.0), (0.0, 3.79e-190), (2.225073858507e-311, 0.0)],
                    [(0, 0, 0), (1e-110, 0, 0), (0, 1e-110, 0), (0, 0, 1e-110)],
                    [(1e-320, 5e-321), (1.0, 0.0), (0.0, 1.0)]):
            assert orientation(pts) == leibniz_sign(pts) != 0

    def test_scale_invariance_of_kernels(self):
        rng = np.random.default_rng(3)
        for d in (2, 3):
            pts = rng.random((40, d + 1, d))
            want = orientation_signs(pts)
            for scale in (2.0 ** -1000, 2.0 ** -300, 2.0 ** 300):
                assert [orientation(p * scale) for p in pts] == want.tolist()

    @settings(max_examples=200, deadline=None)
    @given(simplex_strategy(2))
    def test_matches_rational_oracle_2d(self, pts):
        assert orientation(pts) == leibniz_sign(pts)

    @settings(max_examples=150, deadline=None)
    @given(simplex_strategy(3))
    def test_matches_rational_oracle_3d(self, pts):
        assert orientation(pts) == leibniz_sign(pts)

    @settings(max_examples=60, deadline=None)
    @given(simplex_strategy(4))
    def test_matches_rational_oracle_4d(self, pts):
        assert int(orientation_signs(np.array([pts], dtype=float))[0]) == leibniz_sign(pts)

    @settings(max_examples=100, deadline=None)
    @given(simplex_strategy(3), st.data())
    def test_transposition_flips_sign(self, pts, data):
        i, j = data.draw(st.lists(st.integers(0, 3), min_size=2, max_size=2, unique=True))
        swapped = list(pts)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        assert orientation(swapped) == -orientation(pts)


class TestVolume:
    def test_examples(self):
        assert simplex_volume([(0, 0), (1, 0), (0, 1)]) == 0.5
        assert simplex_volume([(0, 0), (1, 1), (2, 2)]) == 0.0
        assert simplex_volume([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]) == pytest.approx(1 / 6)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            simplex_volume([(0, 0), (1, 0), (0, 1)], dim=3)

    @settings(max_examples=100, deadline=None)
    @given(simplex_strategy(3), st.lists(coord, min_size=3, max_size=3), st.integers(0, 2**32 - 1))
    def test_rigid_motion_invariance(self, pts, shift, seed):
        pts = np.array(pts)
        v = simplex_volume(pts)
        assume(v > 1e-3)
        q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((3, 3)))
        moved = pts @ q.T + np.array(shift)
        # rotating in floats perturbs the determinant by about eps * |x|^3
        scale = float(np.max(np.abs(pts))) + float(np.max(np.abs(shift))) + 1.0
        assert simplex_volume(moved) == pytest.approx(v, rel=1e-9, abs=1e-13 * scale ** 3)


class TestOpenSimplex:
    tri = [(0, 0), (1, 0), (0, 1)]

    def test_examples(self):
        assert point_in_open_simplex((1 / 3, 1 / 3), self.tri)
        assert not point_in_open_simplex((0, 0), self.tri)
        assert not point_in_open_simplex((0.5, 0), self.tri)

    def test_degenerate(self):
        with pytest.raises(DegenerateSimplexError):
            point_in_open_simplex((0.5, 0.5), [(0, 0), (1, 1), (2, 2)])

    @settings(max_examples=150, deadline=None)
    @given(simplex_strategy(2), st.lists(coord, min_size=2, max_size=2))
    def test_inside_implies_positive_replacements(self, tri, p):
        assume(orientation(tri) != 0)
        if point_in_open_simplex(p, tri):
            for i in range(3):
                rep = list(tri)
                rep[i] = p
                assert orientation(rep) == orientation(tri)


class TestGeneralPosition:
    def test_examples(self):
        assert not is_general_position([(0, 0), (1, 1), (2, 2)])
        assert is_general_position([(0, 0), (1, 0), (0, 1)])
        assert not is_general_position([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0)])

    def test_3d_lower_dimensional_degeneracies(self):
        # three collinear points in space
        assert not is_general_position([(0, 0, 0), (1, 1, 1), (2, 2, 2), (5, 0, 1)])
        # four coplanar points
        assert not is_general_position([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)])
        assert is_general_position([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1.5)])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 12), st.sampled_from([2, 3]))
    def test_permutation_invariant_and_duplicates(self, seed, n, d):
        rng = np.random.default_rng(seed)
        pts = rng.integers(0, 4, size=(n, d)).astype(float)
        perm = rng.permutation(n)
        assert is_general_position(pts) == is_general_position(pts[perm])
        dup = np.vstack([pts, pts[:1]])
        assert not is_general_position(dup)

    def test_pointset_rejects(self):
        with pytest.raises(GeneralPositionError):
            PointSet([(0, 0), (0, 0), (1, 1)])
        with pytest.raises(GeometryError):
            PointSet([(0, 0), (math.nan, 1)])
        with pytest.raises(GeneralPositionError) as err:
            PointSet([(0, 0), (1, 1), (2, 2), (0, 1)], check_general_position=True)
        assert sorted(err.value.subset) == [0, 1, 2]


class TestEdges:
    def test_examples(self):
        assert max_edge_length([(0, 0), (3, 4)]) == 5
        s = math.sqrt(3) / 2
        assert max_edge_length([(0, 0), (1, 0), (0.5, s)]) == pytest.approx(1)
        assert max_edge_length([(0, 0, 0), (1, 0, 0), (0, 2, 0)]) == pytest.approx(math.sqrt(5))

    def test_too_few(self):
        with pytest.raises(GeometryError):
            max_edge_length([(0, 0)])


def test_hull_square_with_interior():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.4)]
    assert convex_hull_2d(pts) == [0, 1, 2, 3]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.sampled_from([2, 3]))
def test_file_round_trip(seed, n, d):
    pts = np.random.default_rng(seed).standard_normal((n, d)) * 10.0 ** np.random.default_rng(seed).integers(-5, 5)
    back = parse_point_set(format_point_set(PointSet(pts)))
    assert np.array_equal(back.coords, pts)


def test_parse_errors():
    with pytest.raises(GeometryError):
        parse_point_set("2 3\n0 0\n1 1\n")
    with pytest.raises(DimensionMismatchError):
        parse_point_set("2 1\n0 0 0\n")
