from itertools import product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftlattice.cubical import LatticeFace, face_map, faces_strictly_between, vertices
from shiftlattice.geometry import PointCloud
from shiftlattice.lattice import GridVertex, LatticeHierarchy, vertex_map
from shiftlattice.persistence import reduced_betti_numbers
from shiftlattice.spans import (ActiveSet, active_vertices, enumerate_active_flags, flag_map,
                                image_active_set, is_flag, is_spanned, local_span, spanned_faces)


def active(zs, s=0):
    return ActiveSet(s, {z: i for i, z in enumerate(sorted(zs))})


def stirling2(n, k):
    if n == k:
        return 1
    if k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def by_len(flags):
    out = {}
    for f in flags:
        out[len(f)] = out.get(len(f), 0) + 1
    return out


def test_vertex_spanned_iff_active():
    V = {(0, 0), (1, 1)}
    assert is_spanned(LatticeFace(0, (0, 0), 0), V)
    assert not is_spanned(LatticeFace(0, (1, 0), 0), V)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_antipodal_spans_only_cube(d):
    V = {(0,) * d, (1,) * d}
    cube = LatticeFace(0, (0,) * d, (1 << d) - 1)
    assert is_spanned(cube, V)
    for f in faces_strictly_between(None, cube):
        assert is_spanned(f, V) == (f.dim == 0 and f.anchor in V)
    assert spanned_faces(V, 0) == sorted([cube, LatticeFace(0, (0,) * d, 0), LatticeFace(0, (1,) * d, 0)])


def test_adjacent_pair():
    V = {(0, 0), (1, 0)}
    assert is_spanned(LatticeFace(0, (0, 0), 0b01), V)
    assert not is_spanned(LatticeFace(0, (0, 0), 0b11), V)


def test_square_subdivision_counts():
    V = active(product((0, 1), repeat=2))
    assert by_len(enumerate_active_flags(V, 2)) == {1: 9, 2: 16, 3: 8}
    sq = LatticeFace(0, (0, 0), 3)
    assert len(local_span(sq, V)) == 33


def test_singleton_and_antipodal_flags():
    assert by_len(enumerate_active_flags(active([(4, 4)]), 2)) == {1: 1}
    assert by_len(enumerate_active_flags(active([(0, 0), (1, 1)]), 2)) == {1: 3, 2: 2}


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_stirling_chain_counts(d):
    cube = LatticeFace(0, (0,) * d, (1 << d) - 1)
    V = active(product((0, 1), repeat=d))
    flags = enumerate_active_flags(V, d)
    for k in range(1, d + 1):
        n = sum(1 for fl in flags if len(fl) == k + 1 and fl[0].anchor == (0,) * d
                and fl[0].dim == 0 and fl[-1] == cube)
        assert n == factorial(k) * stirling2(d, k)


def test_local_span_empty():
    assert local_span(LatticeFace(0, (5, 5), 3), active([(0, 0)])) == []


def test_flag_map_collapse():
    h = LatticeHierarchy(1.0, 1, ((1,),), 1)
    v, e = LatticeFace(0, (0,), 0), LatticeFace(0, (0,), 1)
    assert flag_map(h, (v,)) == (LatticeFace(1, (0,), 0),)
    assert flag_map(h, (v, e)) == (LatticeFace(1, (0,), 0),)


def test_is_flag():
    v, e, sq = LatticeFace(0, (0, 0), 0), LatticeFace(0, (0, 0), 1), LatticeFace(0, (0, 0), 3)
    assert is_flag((v, e, sq)) and not is_flag((e, v)) and not is_flag((v, v))


def test_active_vertices_far_points():
    h = LatticeHierarchy(1.0, 1, ((1,),), 1)
    A = active_vertices(h, PointCloud.from_array([[0.0], [10.0]]), 0)
    assert len(A) == 2


def test_active_vertices_coarse_scale_singleton():
    cloud = PointCloud.from_array(np.random.default_rng(2).random((10, 2)))
    h = LatticeHierarchy(0.01, 10, tuple((1, 1) for _ in range(10)), 2)
    assert len(active_vertices(h, cloud, 10)) == 1


zs2 = st.sets(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=10)


def brute_spanned(f, V):
    inside = [v.z for v in vertices(f) if v.z in V]
    if not inside:
        return False
    for i in range(len(f.anchor)):
        if f.mask >> i & 1 and len({z[i] for z in inside}) < 2:
            return False
    return True


@settings(max_examples=150, deadline=None)
@given(zs2)
def test_spanned_faces_brute_force(V):
    brute = sorted(LatticeFace(0, a, m) for a in product(range(-1, 4), repeat=2) for m in range(4)
                   if brute_spanned(LatticeFace(0, a, m), V))
    assert spanned_faces(V, 0) == brute


@settings(max_examples=150, deadline=None)
@given(zs2, st.tuples(st.sampled_from([-1, 1]), st.sampled_from([-1, 1])))
def test_active_faces_map_to_active_faces(V, sig):
    h = LatticeHierarchy(1.0, 1, (sig,), 2)
    A = active(V)
    img = image_active_set(h, A)
    assert img == {vertex_map(h, GridVertex(0, z)).z for z in V}
    for f in spanned_faces(A):
        assert is_spanned(face_map(h, f), img)
    for fl in enumerate_active_flags(A, 2):
        out = flag_map(h, fl)
        assert is_flag(out) and all(is_spanned(e, img) for e in out)


@settings(max_examples=80, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)), min_size=1),
       st.integers(0, 7))
def test_local_span_acyclic(V, mask):
    f = LatticeFace(0, (0, 0, 0), mask)
    span = local_span(f, active(V))
    if not span:
        return
    ids = {}
    simplices = [tuple(ids.setdefault(x, len(ids)) for x in fl) for fl in span]
    assert all(b == 0 for b in reduced_betti_numbers(simplices).values())
