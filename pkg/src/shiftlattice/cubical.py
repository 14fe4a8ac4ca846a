"""Faces of the cubical complex of a lattice, stored as (scale, anchor, bitmask).

A face spans direction ``i`` iff bit ``i`` of ``mask`` is set; its vertices are
``anchor + sum(eps_i * e_i)`` over ``eps_i in {0, 1}`` on spanned directions.
Tuple order of :class:`LatticeFace` is the canonical face order.
"""

from __future__ import annotations

import itertools
from typing import Iterator, NamedTuple

from .lattice import GridVertex, LatticeHierarchy, map_coordinate


class LatticeFace(NamedTuple):
    s: int
    anchor: tuple[int, ...]
    mask: int

    @property
    def dim(self) -> int:
        return self.mask.bit_count()

    def spans(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __str__(self) -> str:
        return format_face(self)


def format_face(f: LatticeFace) -> str:
    return f"{f.s}:({','.join(str(a) for a in f.anchor)}):{f.mask}"


def vertex_face(v: GridVertex) -> LatticeFace:
    return LatticeFace(v.s, tuple(v.z), 0)


def directions(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def vertices(f: LatticeFace) -> list[GridVertex]:
    dirs = directions(f.mask)
    out = []
    for bits in itertools.product((0, 1), repeat=len(dirs)):
        z = list(f.anchor)
        for i, b in zip(dirs, bits):
            z[i] += b
        out.append(GridVertex(f.s, tuple(z)))
    return out


def facets(f: LatticeFace) -> list[LatticeFace]:
    """Facets in opposite pairs: [lower_i, upper_i] for each spanned direction i."""
    if f.mask == 0:
        raise ValueError("a vertex has no facets")
    out = []
    for i in directions(f.mask):
        m = f.mask & ~(1 << i)
        up = list(f.anchor)
        up[i] += 1
        out.append(LatticeFace(f.s, f.anchor, m))
        out.append(LatticeFace(f.s, tuple(up), m))
    return out


def opposite_facet_pairs(f: LatticeFace) -> list[tuple[LatticeFace, LatticeFace]]:
    fs = facets(f)
    return [(fs[j], fs[j + 1]) for j in range(0, len(fs), 2)]


def cofaces_of_vertex(v: GridVertex) -> list[LatticeFace]:
    """All 3**d faces containing v, in canonical order."""
    d = len(v.z)
    out = []
    # per direction: 0 = not spanned, 1 = spanned with v low, 2 = spanned with v high
    for choice in itertools.product((0, 1, 2), repeat=d):
        anchor = list(v.z)
        mask = 0
        for i, c in enumerate(choice):
            if c:
                mask |= 1 << i
                if c == 2:
                    anchor[i] -= 1
        out.append(LatticeFace(v.s, tuple(anchor), mask))
    out.sort()
    return out


def face_map(h: LatticeHierarchy, f: LatticeFace) -> LatticeFace:
    """Image of f one scale up; acts on each coordinate independently."""
    if f.s >= h.s_max:
        raise ValueError(f"no scale above {f.s}")
    sig = h.shift(f.s)
    anchor = []
    mask = 0
    for i, (a, c) in enumerate(zip(f.anchor, sig)):
        lo = map_coordinate(a, c)
        anchor.append(lo)
        if f.mask >> i & 1 and map_coordinate(a + 1, c) != lo:
            mask |= 1 << i
    return LatticeFace(f.s + 1, tuple(anchor), mask)


def contains(outer: LatticeFace, inner: LatticeFace) -> bool:
    """True iff inner is a (not necessarily proper) subface of outer."""
    if outer.s != inner.s or inner.mask & ~outer.mask:
        return False
    for i, (a, b) in enumerate(zip(outer.anchor, inner.anchor)):
        if outer.mask >> i & 1 and not inner.mask >> i & 1:
            if b != a and b != a + 1:
                return False
        elif a != b:
            return False
    return True


def _expand(s: int, options: list[tuple[tuple[int, int], ...]]) -> Iterator[LatticeFace]:
    # options[i]: admissible (anchor_i, spanned_i) values for coordinate i
    for combo in itertools.product(*options):
        anchor = tuple(a for a, _ in combo)
        mask = 0
        for i, (_, sp) in enumerate(combo):
            if sp:
                mask |= 1 << i
        yield LatticeFace(s, anchor, mask)


def faces_strictly_between(a: LatticeFace | None = None,
                           b: LatticeFace | None = None) -> list[LatticeFace]:
    """Faces e with a < e < b (strict).  ``a=None`` means bottom, ``b=None`` means top."""
    if a is None and b is None:
        raise ValueError("at least one bound is required")
    if a is not None and b is not None and not contains(b, a):
        raise ValueError(f"{format_face(a)} is not contained in {format_face(b)}")
    ref = b if b is not None else a
    options = []
    for i in range(len(ref.anchor)):
        if b is None:
            if a.mask >> i & 1:
                options.append(((a.anchor[i], 1),))
            else:
                x = a.anchor[i]
                options.append(((x, 0), (x, 1), (x - 1, 1)))
        elif not b.mask >> i & 1:
            options.append(((b.anchor[i], 0),))
        elif a is None:
            x = b.anchor[i]
            options.append(((x, 1), (x, 0), (x + 1, 0)))
        elif a.mask >> i & 1:
            options.append(((b.anchor[i], 1),))
        else:
            options.append(((b.anchor[i], 1), (a.anchor[i], 0)))
    out = [e for e in _expand(ref.s, options) if e != a and e != b]
    out.sort()
    return out
