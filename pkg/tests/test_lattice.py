from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftlattice.geometry import PointCloud, ScaleBounds
from shiftlattice.lattice import (GridVertex, LatticeHierarchy, build_hierarchy, draw_shifts,
                                  locate, map_coordinate, representative, vertex_map)


def hier(shifts, lam=1.0):
    return LatticeHierarchy(lam=lam, s_max=len(shifts), shifts=tuple(map(tuple, shifts)),
                            dim=len(shifts[0]) if shifts else 1)


def test_one_dim_scale_range():
    b = ScaleBounds(cp=3.0, diam_est=4.0, spread=4 / 3, alpha0=1.0, alpham=4.0, dim=1)
    h = build_hierarchy(b, 1, seed=5)
    assert list(h.scales) == [0, 1, 2]
    assert len(h.shifts) == 2


def test_seed_determinism():
    assert draw_shifts(10, 3, 42) == draw_shifts(10, 3, 42)
    assert all(c in (-1, 1) for row in draw_shifts(50, 4, 1) for c in row)


def test_offsets_unfold():
    h = hier([(1, 1), (-1, 1)], lam=0.75)
    lam = Fraction(h.lam)
    off1 = tuple(lam * c for c in h.offset(1))
    off2 = tuple(lam * c for c in h.offset(2))
    a0, a1 = Fraction(h.alpha(0)), Fraction(h.alpha(1))
    assert off1 == (a0 / 2, a0 / 2)
    assert off2 == (off1[0] - a1 / 2, off1[1] + a1 / 2)


def test_origin_of_shifted_grid():
    # alpha=2 with all-positive shift puts the next grid's origin at (1,...,1)
    h = hier([(1, 1, 1)], lam=2.0)
    assert h.embed(GridVertex(1, (0, 0, 0))) == (1.0, 1.0, 1.0)
    assert vertex_map(h, GridVertex(0, (0, 0, 0))) == GridVertex(1, (0, 0, 0))


def test_locate_examples():
    h = hier([(1, 1)])
    assert locate(h, (0.4, 0.6), 0) == GridVertex(0, (0, 1))
    assert locate(h, (3.0, -2.0), 0) == GridVertex(0, (3, -2))
    # ties go to the smaller integer
    assert locate(h, (0.5, -0.5), 0) == GridVertex(0, (0, -1))


def test_representative_nearest():
    h = hier([(1,)])
    c = PointCloud.from_array([[0.3], [0.1]])
    assert representative(h, GridVertex(0, (0,)), c) == 1
    with pytest.raises(ValueError):
        representative(h, GridVertex(0, (5,)), c)
    single = PointCloud.from_array([[7.2]])
    assert representative(h, locate(h, (7.2,), 0), single) == 0


def test_representative_tie_smallest_id():
    h = hier([(1,)])
    c = PointCloud.from_array([[0.2], [-0.2]])
    assert representative(h, GridVertex(0, (0,)), c) == 0


def test_map_coordinate_table():
    assert [map_coordinate(z, 1) for z in range(-2, 4)] == [-1, -1, 0, 0, 1, 1]
    assert [map_coordinate(z, -1) for z in range(-2, 4)] == [-1, 0, 0, 1, 1, 2]


def test_bad_hierarchy():
    with pytest.raises(ValueError):
        LatticeHierarchy(lam=1.0, s_max=2, shifts=((1,),), dim=1)
    with pytest.raises(ValueError):
        LatticeHierarchy(lam=1.0, s_max=1, shifts=((0,),), dim=1)
    with pytest.raises(ValueError):
        vertex_map(hier([(1,)]), GridVertex(1, (0,)))


def test_header_lines():
    h = LatticeHierarchy(lam=0.5, s_max=2, shifts=((1, -1), (-1, -1)), dim=2, seed=9)
    assert h.header_lines(2) == ["# lambda=0.5 seed=9 d=2 k=2 smin=0 smax=2",
                                 "# shift s=0 +1 -1", "# shift s=1 -1 -1"]


signs = st.sampled_from([-1, 1])


@settings(max_examples=200, deadline=None)
@given(st.integers(-10**6, 10**6), signs)
def test_vertex_map_is_nearest(z, sig):
    # centre 2z (lam/2 units, grid s=0, offset 0) vs next-grid centres 4y + sig
    y = map_coordinate(z, sig)
    assert abs(2 * z - (4 * y + sig)) < 2


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=2), st.lists(signs, min_size=6, max_size=6),
       st.integers(0, 2))
def test_point_in_voronoi_cube_of_located_vertex(p, sg, s):
    h = hier([sg[0:2], sg[2:4], sg[4:6]], lam=0.3)
    # the point lies in the Voronoi cube of its located vertex
    v = locate(h, p, s)
    c = h.center2(v)
    half = Fraction(h.lam) * (1 << s) / 2
    for x, ci in zip(p, c):
        assert abs(Fraction(x) - Fraction(h.lam) * ci / 2) <= half


def test_gcompose_exhaustive_small():
    # g_s(a_s(p)) equals a_{s+1}(b) whenever p is the representative of its cell
    rng = np.random.default_rng(0)
    for seed in range(20):
        pts = rng.random((15, 2))
        c = PointCloud.from_array(pts)
        h = hier([tuple(int(x) for x in rng.choice([-1, 1], 2)) for _ in range(4)], lam=0.05)
        for s in range(4):
            for i, p in enumerate(c.points):
                v = locate(h, p, s)
                if representative(h, v, c) == i:
                    assert vertex_map(h, v) == locate(h, p, s + 1)


def test_all_shift_patterns_nest():
    for sig in product((-1, 1), repeat=2):
        h = hier([sig])
        for z in product(range(-3, 4), repeat=2):
            y = vertex_map(h, GridVertex(0, z))
            X, Y = h.center2(GridVertex(0, z)), h.center2(y)
            assert all(abs(a - b) + 1 <= 2 for a, b in zip(X, Y))
