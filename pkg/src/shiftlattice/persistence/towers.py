"""Barcodes of simplicial towers given as event streams.

:func:`tower_to_filtration` simulates each contraction by coning the closed
star of the removed 0-simplex onto the kept one, which yields an ordinary
filtration with an isomorphic persistence module.  :func:`rank_oracle`
computes the same barcode directly from ranks of the induced maps in
homology and serves as an independent check at small sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from ..errors import BudgetError
from ..rips import FilteredComplex
from ..tower import ContractEvent, Event, IncludeEvent, Replayer, ScaleEvent, Snapshot, replay_all
from .reduction import Bar, Barcode, Basis, boundary_columns, by_dimension, cycle_basis


@dataclass
class ConversionStats:
    inclusions: int = 0
    cone_simplices: int = 0

    @property
    def blowup(self) -> float:
        total = self.inclusions + self.cone_simplices
        return total / self.inclusions if self.inclusions else 1.0


def _faces(sigma: frozenset[int]) -> Iterable[frozenset[int]]:
    items = sorted(sigma)
    for r in range(1, len(items) + 1):
        for sub in combinations(items, r):
            yield frozenset(sub)


def tower_to_filtration(events: Iterable[Event],
                        stats: ConversionStats | None = None) -> FilteredComplex:
    stats = stats if stats is not None else ConversionStats()
    rep = Replayer()
    present: set[frozenset[int]] = set()
    out: list[tuple[tuple[int, ...], float]] = []
    value = None
    for ev in events:
        if isinstance(ev, ScaleEvent):
            value = ev.value
            rep.apply(ev)
        elif isinstance(ev, IncludeEvent):
            sigma = frozenset(ev.vertices)
            rep.apply(ev)
            # ids are never reused, so a fresh inclusion cannot already be in the filtration
            if sigma not in present:
                present.add(sigma)
                out.append((tuple(sorted(sigma)), value))
                stats.inclusions += 1
        elif isinstance(ev, ContractEvent):
            i, j = ev.kept, ev.removed
            closed_star: set[frozenset[int]] = set()
            for tau in rep.star.get(j, ()):
                closed_star.update(_faces(tau))
            for rho in sorted(closed_star, key=lambda x: (len(x), sorted(x))):
                cone = rho | {i}
                if cone not in present:
                    present.add(cone)
                    out.append((tuple(sorted(cone)), value))
                    stats.cone_simplices += 1
            rep.apply(ev)
    return FilteredComplex(out).sort()


# ---------------------------------------------------------------- rank invariant

class _Level:
    """Homology data of one snapshot: cells per dimension, cycles, boundaries."""

    def __init__(self, snap: Snapshot, top: int):
        self.snap = snap
        self.cells = by_dimension(snap.simplices)
        self.pos = {p: {s: i for i, s in enumerate(cs)} for p, cs in self.cells.items()}
        self.cycles: dict[int, list[int]] = {}
        self.bounds: dict[int, Basis] = {}
        for p in range(top + 1):
            cells = self.cells.get(p, [])
            self.cycles[p] = cycle_basis(self.cells.get(p - 1, []), cells)
            b = Basis()
            for col in boundary_columns(cells, self.cells.get(p + 1, [])) if cells else []:
                b.add(col)
            self.bounds[p] = b


def _push(cycle: int, src: _Level, dst: _Level, p: int) -> int:
    out = 0
    cells = src.cells[p]
    pos = dst.pos.get(p, {})
    i = 0
    while cycle:
        if cycle & 1:
            image = frozenset(dst.snap.resolve(v) for v in cells[i])
            if len(image) == p + 1:
                out ^= 1 << pos[tuple(sorted(image))]
        cycle >>= 1
        i += 1
    return out


def rank_oracle(events: list[Event], max_cells: int = 20000) -> Barcode:
    """Barcode from the rank invariant of the tower's homology module."""
    events = list(events)
    snaps = replay_all(events)
    if not snaps:
        return Barcode([])
    if sum(len(s.simplices) for s in snaps) > max_cells:
        raise BudgetError("tower too large for the rank oracle")
    values = [s.scale for s in snaps]
    top = max((len(x) - 1 for s in snaps for x in s.simplices), default=0)
    levels = [_Level(s, top) for s in snaps]
    N = len(levels)
    bars: list[Bar] = []
    for p in range(top + 1):
        r = [[0] * N for _ in range(N)]
        for i in range(N):
            for j in range(i, N):
                dst = levels[j]
                basis = dst.bounds[p].copy()
                base = len(basis)
                for z in levels[i].cycles[p]:
                    basis.add(_push(z, levels[i], dst, p))
                r[i][j] = len(basis) - base

        def rank(i: int, j: int) -> int:
            if i < 0 or j >= N:
                return 0
            return r[i][j]

        for i in range(N):
            for j in range(i, N):
                m = rank(i, j) - rank(i - 1, j) - rank(i, j + 1) + rank(i - 1, j + 1)
                if m < 0:
                    raise RuntimeError("negative bar multiplicity; rank invariant inconsistent")
                death = values[j + 1] if j + 1 < N else math.inf
                bars.extend([Bar(p, values[i], death)] * m)
    return Barcode(bars)
