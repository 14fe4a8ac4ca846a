"""Scale-by-scale construction of the approximation tower as an event stream.

Each 0-simplex of the complex at scale s is an active face of the cubical
complex; higher simplices are flags of active faces.  Passing from s to s+1
emits contractions for 0-simplices whose faces map to the same image (the
smallest id survives), then inclusions for active faces without preimage,
then inclusions for flags without preimage.
"""

from __future__ import annotations

import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .cubical import LatticeFace, cofaces_of_vertex, face_map, faces_strictly_between
from .errors import InputError, MalformedStreamError
from .geometry import PointCloud
from .lattice import GridVertex, LatticeHierarchy
from .spans import Flag, active_vertices, flag_map, is_spanned, spanned_faces


class ScaleEvent(NamedTuple):
    value: float


class IncludeEvent(NamedTuple):
    id: int
    dim: int
    vertices: tuple[int, ...]
    flag: Flag | None = None


class ContractEvent(NamedTuple):
    kept: int
    removed: int


Event = ScaleEvent | IncludeEvent | ContractEvent


@dataclass
class TowerStats:
    includes: dict[int, Counter] = field(default_factory=dict)
    contractions: int = 0
    # inclusions of dim >= 1 none of whose member faces is new at that scale
    orphan_includes: int = 0
    # (dim, scales survived) for simplices whose image lost dimension
    lifetimes: list[tuple[int, int]] = field(default_factory=list)
    censored: int = 0
    complex_sizes: dict[int, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        """Tower size M: number of inclusion events."""
        return sum(sum(c.values()) for c in self.includes.values())

    @property
    def vertex_includes(self) -> int:
        return sum(c[0] for c in self.includes.values())

    def mean_lifetime(self) -> float | None:
        if not self.lifetimes:
            return None
        return sum(t for _, t in self.lifetimes) / len(self.lifetimes)

    def to_csv(self) -> str:
        dims = sorted({d for c in self.includes.values() for d in c})
        out = io.StringIO()
        out.write("s,complex_size," + ",".join(f"include_dim{d}" for d in dims) + "\n")
        for s in sorted(self.complex_sizes):
            c = self.includes.get(s, Counter())
            out.write(f"{s},{self.complex_sizes[s]}," + ",".join(str(c[d]) for d in dims) + "\n")
        return out.getvalue()


@dataclass
class Tower:
    hierarchy: LatticeHierarchy
    max_dim: int
    events: list[Event]
    stats: TowerStats
    n: int
    face_ids: dict[int, dict[LatticeFace, int]] | None = None

    def scale_values(self) -> dict[int, float]:
        return {s: self.hierarchy.alpha(s) for s in self.hierarchy.scales}

    def to_text(self) -> str:
        return events_to_text(self.events, self.hierarchy.header_lines(self.max_dim))


def _extensions(flag: Flag, active: dict) -> Iterable[Flag]:
    """Flags of active faces obtained by inserting one face at any position."""
    for e in faces_strictly_between(None, flag[0]):
        if e in active:
            yield (e,) + flag
    for j in range(len(flag) - 1):
        for e in faces_strictly_between(flag[j], flag[j + 1]):
            if e in active:
                yield flag[: j + 1] + (e,) + flag[j + 1:]
    yield from _upward(flag, active)


def _upward(flag: Flag, active: dict) -> Iterable[Flag]:
    for e in faces_strictly_between(flag[-1], None):
        if e in active:
            yield flag + (e,)


class _Builder:
    def __init__(self, h: LatticeHierarchy, max_dim: int, keep_face_ids: bool):
        self.h = h
        self.k = max_dim
        self.keep = keep_face_ids
        self.events: list[Event] = []
        self.stats = TowerStats()
        self.next_id = 0
        self.face_ids: dict[int, dict[LatticeFace, int]] = {}
        # current scale state: the container S of the text description
        self.faces: dict[LatticeFace, int] = {}
        self.flags: dict[Flag, tuple[int, int]] = {}  # flag -> (id, scale of inclusion)

    def _new_id(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def _emit_scale(self, s: int, pending: list[Event]) -> None:
        if pending:
            self.events.append(ScaleEvent(self.h.alpha(s)))
            self.events.extend(pending)

    def _include_flags(self, s: int, new: list[Flag], new_faces: set, pending: list[Event]) -> None:
        counts = self.stats.includes.setdefault(s, Counter())
        for flag in sorted(new, key=lambda fl: (len(fl), fl)):
            sid = self._new_id()
            self.flags[flag] = (sid, s)
            verts = tuple(self.faces[f] for f in flag)
            pending.append(IncludeEvent(sid, len(flag) - 1, verts, flag))
            counts[len(flag) - 1] += 1
            if not any(f in new_faces for f in flag):
                self.stats.orphan_includes += 1

    def start(self, cloud: PointCloud) -> None:
        s = self.h.s_min
        V = active_vertices(self.h, cloud, s)
        pending: list[Event] = []
        counts = self.stats.includes.setdefault(s, Counter())
        # active vertices first, numbered in order of their representative point
        for z, _ in sorted(V.vertices.items(), key=lambda kv: kv[1]):
            self._include_face(LatticeFace(s, z, 0), pending, counts)
        for f in spanned_faces(V):
            if f not in self.faces:
                self._include_face(f, pending, counts)
        new_faces = set(self.faces)
        flags = [fl for f in sorted(self.faces) for fl in self._flags_above(f, self.faces)]
        self._include_flags(s, flags, new_faces, pending)
        self._emit_scale(s, pending)
        self._finish_scale(s)

    def _include_face(self, f: LatticeFace, pending: list[Event], counts: Counter) -> None:
        i = self._new_id()
        self.faces[f] = i
        pending.append(IncludeEvent(i, 0, (i,), (f,)))
        counts[0] += 1

    def _flags_above(self, bottom: LatticeFace, active: dict,
                     allowed=None) -> list[Flag]:
        """Flags of length >= 2 with the given bottom face."""
        out: list[Flag] = []
        level = [(bottom,)]
        for _ in range(self.k):
            nxt = []
            for fl in level:
                for ext in _upward(fl, active):
                    if allowed is None or ext[-1] in allowed:
                        nxt.append(ext)
            out.extend(nxt)
            level = nxt
        return out

    def _finish_scale(self, s: int) -> None:
        self.stats.complex_sizes[s] = len(self.faces) + len(self.flags)
        if self.keep:
            self.face_ids[s] = dict(self.faces)

    def step(self, s: int) -> None:
        """Advance the state from scale s to s+1."""
        h = self.h
        t = s + 1
        pending: list[Event] = []
        counts = self.stats.includes.setdefault(t, Counter())

        images: dict[LatticeFace, int] = {}
        for f, i in sorted(self.faces.items(), key=lambda kv: kv[1]):
            e = face_map(h, f)
            if e in images:
                pending.append(ContractEvent(images[e], i))
                self.stats.contractions += 1
            else:
                images[e] = i

        zs = {e.anchor for e in images if e.mask == 0}
        new_faces: list[LatticeFace] = []
        spanned_cache: dict[LatticeFace, bool] = {}
        for z in sorted(zs):
            for c in cofaces_of_vertex(GridVertex(t, z)):
                if c in images:
                    continue
                ok = spanned_cache.get(c)
                if ok is None:
                    ok = spanned_cache[c] = is_spanned(c, zs)
                if ok:
                    images[c] = self._new_id()
                    pending.append(IncludeEvent(images[c], 0, (images[c],), (c,)))
                    counts[0] += 1
                    new_faces.append(c)
        self.faces = images

        mapped: dict[Flag, tuple[int, int]] = {}
        for flag, (sid, born) in sorted(self.flags.items(), key=lambda kv: kv[1]):
            img = flag_map(h, flag)
            if len(img) < len(flag):
                self.stats.lifetimes.append((len(flag) - 1, t - born))
            if len(img) >= 2 and img not in mapped:
                mapped[img] = (sid, born)
        self.flags = mapped

        # flags through a new 0-simplex, grown one dimension at a time
        new_set = set(new_faces)
        found: dict[Flag, None] = {}
        for v in new_faces:
            level = [(v,)]
            for _ in range(self.k):
                nxt: dict[Flag, None] = {}
                for fl in level:
                    for ext in _extensions(fl, images):
                        nxt.setdefault(ext, None)
                for ext in nxt:
                    if ext not in mapped:
                        found.setdefault(ext, None)
                level = list(nxt)
        # flags of old faces only that still lack a preimage
        old = {f for f in images if f not in new_set}
        for f in sorted(old):
            for fl in self._flags_above(f, images, allowed=old):
                if fl not in mapped and fl not in found:
                    found[fl] = None
        self._include_flags(t, list(found), new_set, pending)
        self._emit_scale(t, pending)
        self._finish_scale(t)

    def finish(self) -> None:
        self.stats.censored = len(self.flags)


def build_tower(cloud: PointCloud, hierarchy: LatticeHierarchy, max_dim: int,
                keep_face_ids: bool = False) -> Tower:
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    if cloud.dim != hierarchy.dim:
        raise ValueError("cloud and hierarchy dimensions differ")
    b = _Builder(hierarchy, max_dim, keep_face_ids)
    b.start(cloud)
    for s in range(hierarchy.s_min, hierarchy.s_max):
        b.step(s)
    b.finish()
    bound = cloud.n * 3 ** cloud.dim
    if b.stats.vertex_includes > bound:
        raise RuntimeError(f"{b.stats.vertex_includes} 0-simplex inclusions exceed n*3^d = {bound}")
    return Tower(hierarchy, max_dim, b.events, b.stats, cloud.n,
                 b.face_ids if keep_face_ids else None)


# ---------------------------------------------------------------- text format

def events_to_text(events: Iterable[Event], header: Iterable[str] = ()) -> str:
    lines = list(header)
    for ev in events:
        if isinstance(ev, ScaleEvent):
            lines.append(f"scale {ev.value!r}")
        elif isinstance(ev, IncludeEvent):
            lines.append(f"include {ev.id} {ev.dim} " + " ".join(map(str, ev.vertices)))
        else:
            lines.append(f"contract {ev.kept} {ev.removed}")
    return "\n".join(lines) + "\n"


def write_events(path: "str | Path", tower: Tower) -> None:
    Path(path).write_text(tower.to_text(), encoding="utf-8")


@dataclass
class StreamHeader:
    values: dict[str, str] = field(default_factory=dict)
    shifts: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def get(self, key: str, conv=str, default=None):
        return conv(self.values[key]) if key in self.values else default


def parse_events(text: str) -> tuple[StreamHeader, list[Event]]:
    header = StreamHeader()
    events: list[Event] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].split()
            if body and body[0] == "shift":
                s = int(body[1].split("=", 1)[1])
                header.shifts[s] = tuple(int(x) for x in body[2:])
            else:
                for tok in body:
                    if "=" in tok:
                        key, val = tok.split("=", 1)
                        header.values[key] = val
            continue
        parts = line.split()
        try:
            if parts[0] == "scale" and len(parts) == 2:
                events.append(ScaleEvent(float(parts[1])))
            elif parts[0] == "include" and len(parts) >= 4:
                sid, dim = int(parts[1]), int(parts[2])
                events.append(IncludeEvent(sid, dim, tuple(int(x) for x in parts[3:])))
            elif parts[0] == "contract" and len(parts) == 3:
                events.append(ContractEvent(int(parts[1]), int(parts[2])))
            else:
                raise ValueError
        except ValueError:
            raise InputError(f"line {lineno}: cannot parse event {line!r}") from None
    return header, events


def read_events(path: "str | Path") -> tuple[StreamHeader, list[Event]]:
    return parse_events(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------- replay

@dataclass
class Snapshot:
    simplices: set[frozenset[int]]
    alias: dict[int, int]
    scale: float | None

    def vertices(self) -> set[int]:
        return {next(iter(x)) for x in self.simplices if len(x) == 1}

    def resolve(self, i: int) -> int:
        while i in self.alias:
            i = self.alias[i]
        return i


class Replayer:
    """Applies events one at a time, maintaining the current complex."""

    def __init__(self):
        self.simplices: set[frozenset[int]] = set()
        self.star: dict[int, set[frozenset[int]]] = defaultdict(set)
        self.alive: set[int] = set()
        self.dead: set[int] = set()
        self.used: set[int] = set()
        self.alias: dict[int, int] = {}
        self.scale: float | None = None
        self.index = 0

    def _add(self, sigma: frozenset[int]) -> None:
        if sigma not in self.simplices:
            self.simplices.add(sigma)
            for v in sigma:
                self.star[v].add(sigma)

    def apply(self, ev: Event) -> None:
        idx = self.index
        self.index += 1
        if isinstance(ev, ScaleEvent):
            if self.scale is not None and ev.value < self.scale:
                raise MalformedStreamError("scale values must not decrease", idx)
            self.scale = ev.value
            return
        if self.scale is None:
            raise MalformedStreamError("stream must begin with a scale event", idx)
        if isinstance(ev, IncludeEvent):
            if ev.id in self.used:
                raise MalformedStreamError(f"simplex id {ev.id} reused", idx)
            if len(ev.vertices) != ev.dim + 1 or len(set(ev.vertices)) != ev.dim + 1:
                raise MalformedStreamError("vertex list does not match dimension", idx)
            self.used.add(ev.id)
            if ev.dim == 0:
                if ev.vertices[0] != ev.id:
                    raise MalformedStreamError("0-simplex must list its own id", idx)
                self.alive.add(ev.id)
                self._add(frozenset((ev.id,)))
                return
            for v in ev.vertices:
                if v not in self.alive:
                    raise MalformedStreamError(f"unknown or removed 0-simplex {v}", idx)
            sigma = frozenset(ev.vertices)
            for v in sigma:
                if sigma - {v} not in self.simplices:
                    raise MalformedStreamError(f"missing face {sorted(sigma - {v})}", idx)
            if sigma in self.simplices:
                raise MalformedStreamError(f"simplex {sorted(sigma)} already present", idx)
            self._add(sigma)
            return
        i, j = ev.kept, ev.removed
        if i == j or i not in self.alive or j not in self.alive:
            raise MalformedStreamError(f"invalid contraction ({i}, {j})", idx)
        if i > j:
            raise MalformedStreamError("kept id must be smaller than removed id", idx)
        self.contract(i, j)

    def contract(self, i: int, j: int) -> None:
        touched = self.star.pop(j, set())
        for sigma in touched:
            self.simplices.discard(sigma)
            for v in sigma:
                if v != j:
                    self.star[v].discard(sigma)
        for sigma in touched:
            self._add((sigma - {j}) | {i})
        self.alive.discard(j)
        self.dead.add(j)
        self.alias[j] = i

    def snapshot(self) -> Snapshot:
        return Snapshot(set(self.simplices), dict(self.alias), self.scale)


def replay(events: Iterable[Event], upto: float | None = None) -> Snapshot:
    """Complex after every event whose scale is <= upto (all events if upto is None)."""
    r = Replayer()
    for ev in events:
        if upto is not None and isinstance(ev, ScaleEvent) and ev.value > upto:
            break
        r.apply(ev)
    return r.snapshot()


def replay_all(events: Iterable[Event]) -> list[Snapshot]:
    """Snapshot after each scale's batch of events, in stream order."""
    r = Replayer()
    out: list[Snapshot] = []
    for ev in events:
        if isinstance(ev, ScaleEvent) and r.scale is not None:
            out.append(r.snapshot())
        r.apply(ev)
    if r.scale is not None:
        out.append(r.snapshot())
    return out
