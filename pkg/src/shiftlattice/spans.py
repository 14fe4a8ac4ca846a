"""Active vertices, spanned faces, and flag enumeration of barycentric spans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Mapping

from .cubical import (LatticeFace, cofaces_of_vertex, contains, directions, face_map,
                      faces_strictly_between, vertices)
from .geometry import PointCloud
from .lattice import GridVertex, LatticeHierarchy, _exact_key, locate, map_coordinate

Flag = tuple[LatticeFace, ...]


@dataclass(frozen=True)
class ActiveSet:
    """Active vertices of one scale, keyed by lattice coordinates, valued by representative id."""

    s: int
    vertices: Mapping[tuple[int, ...], int]

    def __contains__(self, z) -> bool:
        if isinstance(z, GridVertex):
            return z.s == self.s and z.z in self.vertices
        return z in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(sorted(self.vertices))

    def grid_vertices(self) -> list[GridVertex]:
        return [GridVertex(self.s, z) for z in sorted(self.vertices)]


def active_vertices(h: LatticeHierarchy, cloud: PointCloud, s: int) -> ActiveSet:
    """Image of the cloud under point location, with closest-point representatives."""
    best: dict[tuple[int, ...], tuple] = {}
    for i, p in enumerate(cloud.points):
        v = locate(h, p, s)
        key = (_exact_key(h, v, p, cloud.metric), i)
        if v.z not in best or key < best[v.z]:
            best[v.z] = key
    return ActiveSet(s, {z: key[1] for z, key in best.items()})


def is_spanned(f: LatticeFace, V: Collection[tuple[int, ...]]) -> bool:
    """f meets V and the meet lies in no facet of f."""
    if f.mask == 0:
        return f.anchor in V
    inside = [v.z for v in vertices(f) if v.z in V]
    if not inside:
        return False
    for i in directions(f.mask):
        a = f.anchor[i]
        if not any(z[i] == a for z in inside) or not any(z[i] == a + 1 for z in inside):
            return False
    return True


def spanned_faces(V: ActiveSet | Iterable[tuple[int, ...]], s: int | None = None) -> list[LatticeFace]:
    if isinstance(V, ActiveSet):
        s, zs = V.s, set(V.vertices)
    else:
        zs = set(V)
    found = set()
    for z in zs:
        for f in cofaces_of_vertex(GridVertex(s, z)):
            if f not in found and is_spanned(f, zs):
                found.add(f)
    return sorted(found)


def _flags_over(faces: list[LatticeFace], max_dim: int) -> list[Flag]:
    face_set = set(faces)
    up: dict[LatticeFace, list[LatticeFace]] = {
        f: [e for e in faces_strictly_between(f, None) if e in face_set] for f in faces
    }
    out: list[Flag] = []
    stack: list[Flag] = [(f,) for f in faces]
    while stack:
        flag = stack.pop()
        out.append(flag)
        if len(flag) <= max_dim:
            stack.extend(flag + (e,) for e in up[flag[-1]])
    out.sort(key=lambda fl: (len(fl), fl))
    return out


def enumerate_active_flags(V: ActiveSet, max_dim: int) -> list[Flag]:
    """All flags of spanned faces with at most max_dim + 1 members, each once."""
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    return _flags_over(spanned_faces(V), max_dim)


def local_span(f: LatticeFace, V: ActiveSet) -> list[Flag]:
    """Active flags whose members all lie in f."""
    zs = set(V.vertices)
    inside = [e for e in [f, *faces_strictly_between(None, f)] if is_spanned(e, zs)] \
        if f.mask else ([f] if f.anchor in zs else [])
    return _flags_over(sorted(inside), f.dim)


def is_flag(faces: Flag) -> bool:
    return all(a != b and contains(b, a) for a, b in zip(faces, faces[1:]))


def flag_map(h: LatticeHierarchy, flag: Flag) -> Flag:
    out: list[LatticeFace] = []
    for f in flag:
        e = face_map(h, f)
        if not out or out[-1] != e:
            out.append(e)
    return tuple(out)


def image_active_set(h: LatticeHierarchy, V: ActiveSet) -> set[tuple[int, ...]]:
    """Vertex-map image of an active set (equals the next active set)."""
    sig = h.shift(V.s)
    return {tuple(map_coordinate(x, c) for x, c in zip(z, sig)) for z in V.vertices}
