"""Barcodes and Z/2 boundary-matrix reduction.

Chains are Python ints used as bitsets over simplex indices; adding two
chains is XOR.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, NamedTuple

from ..errors import InputError
from ..rips import FilteredComplex


class Bar(NamedTuple):
    dim: int
    birth: float
    death: float  # math.inf for essential classes

    @property
    def finite(self) -> bool:
        return not math.isinf(self.death)


@dataclass
class Barcode:
    bars: list[Bar] = field(default_factory=list)

    def __post_init__(self):
        self.bars = sorted(Bar(int(d), float(b), float(e)) for d, b, e in self.bars)

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def __eq__(self, other) -> bool:
        return isinstance(other, Barcode) and self.bars == other.bars

    def dims(self) -> list[int]:
        return sorted({b.dim for b in self.bars})

    def in_dim(self, dim: int) -> list[Bar]:
        return [b for b in self.bars if b.dim == dim]

    def multiset(self) -> Counter:
        return Counter(self.bars)

    def infinite(self, dim: int | None = None) -> list[Bar]:
        return [b for b in self.bars if not b.finite and (dim is None or b.dim == dim)]

    def restrict(self, max_dim: int) -> "Barcode":
        return Barcode([b for b in self.bars if b.dim <= max_dim])

    def to_text(self) -> str:
        lines = [f"{b.dim} {b.birth!r} {'inf' if not b.finite else repr(b.death)}"
                 for b in self.bars]
        return "\n".join(lines) + ("\n" if lines else "")


def write_barcode(path: "str | Path", barcode: Barcode) -> None:
    Path(path).write_text(barcode.to_text(), encoding="utf-8")


def parse_barcode(text: str) -> Barcode:
    bars = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            dim, birth = int(parts[0]), float(parts[1])
            death = math.inf if parts[2] == "inf" else float(parts[2])
        except (ValueError, IndexError):
            raise InputError(f"line {lineno}: cannot parse bar {line!r}") from None
        if len(parts) != 3:
            raise InputError(f"line {lineno}: expected '<dim> <birth> <death|inf>'")
        bars.append(Bar(dim, birth, death))
    return Barcode(bars)


def read_barcode(path: "str | Path") -> Barcode:
    return parse_barcode(Path(path).read_text(encoding="utf-8"))


def reduce(filtered: FilteredComplex, drop_zero: bool = True) -> Barcode:
    """Persistence barcode over Z/2 by standard column reduction."""
    index: dict[tuple[int, ...], int] = {}
    dims: list[int] = []
    values: list[float] = []
    pivot_of: dict[int, int] = {}  # lowest row -> reduced column
    columns: dict[int, int] = {}
    paired: set[int] = set()
    bars: list[Bar] = []
    for j, (simplex, value) in enumerate(filtered.simplices):
        index[simplex] = j
        dims.append(len(simplex) - 1)
        values.append(value)
        col = 0
        if len(simplex) > 1:
            for face in combinations(simplex, len(simplex) - 1):
                try:
                    col |= 1 << index[face]
                except KeyError:
                    raise InputError(f"face {face} of {simplex} precedes it nowhere") from None
        while col:
            low = col.bit_length() - 1
            other = pivot_of.get(low)
            if other is None:
                break
            col ^= columns[other]
        if col:
            low = col.bit_length() - 1
            pivot_of[low] = j
            columns[j] = col
            paired.add(low)
            paired.add(j)
            if not drop_zero or values[low] != value:
                bars.append(Bar(dims[low], values[low], value))
    for j in range(len(values)):
        if j not in paired:
            bars.append(Bar(dims[j], values[j], math.inf))
    return Barcode(bars)


# ---------------------------------------------------------------- plain homology

class Basis:
    """Incrementally built Z/2 row-echelon basis keyed by leading bit."""

    def __init__(self):
        self.rows: dict[int, int] = {}

    def copy(self) -> "Basis":
        b = Basis()
        b.rows = dict(self.rows)
        return b

    def reduce(self, v: int) -> int:
        while v:
            low = v.bit_length() - 1
            r = self.rows.get(low)
            if r is None:
                return v
            v ^= r
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self.rows[v.bit_length() - 1] = v
            return True
        return False

    def __len__(self) -> int:
        return len(self.rows)


def by_dimension(simplices: Iterable[Iterable[int]]) -> dict[int, list[tuple[int, ...]]]:
    out: dict[int, list[tuple[int, ...]]] = {}
    for s in simplices:
        t = tuple(sorted(s))
        out.setdefault(len(t) - 1, []).append(t)
    for v in out.values():
        v.sort()
    return out


def boundary_columns(lower: list[tuple[int, ...]], upper: list[tuple[int, ...]]) -> list[int]:
    pos = {s: i for i, s in enumerate(lower)}
    cols = []
    for s in upper:
        col = 0
        for face in combinations(s, len(s) - 1):
            col ^= 1 << pos[face]
        cols.append(col)
    return cols


def cycle_basis(lower: list[tuple[int, ...]], cells: list[tuple[int, ...]]) -> list[int]:
    """Basis of the kernel of the boundary on ``cells`` (as bitsets over cells)."""
    if not cells:
        return []
    if len(cells[0]) == 1:
        return [1 << i for i in range(len(cells))]
    cols = boundary_columns(lower, cells)
    pivots: dict[int, tuple[int, int]] = {}
    cycles = []
    for i, col in enumerate(cols):
        comb = 1 << i
        while col:
            low = col.bit_length() - 1
            if low not in pivots:
                break
            pcol, pcomb = pivots[low]
            col ^= pcol
            comb ^= pcomb
        if col:
            pivots[col.bit_length() - 1] = (col, comb)
        else:
            cycles.append(comb)
    return cycles


def betti_numbers(simplices: Iterable[Iterable[int]]) -> dict[int, int]:
    """Z/2 Betti numbers of a finite simplicial complex (closed under faces)."""
    cells = by_dimension(simplices)
    if not cells:
        return {}
    top = max(cells)
    ranks = {}
    for p in range(1, top + 1):
        b = Basis()
        for col in boundary_columns(cells.get(p - 1, []), cells.get(p, [])):
            b.add(col)
        ranks[p] = len(b)
    return {p: len(cells.get(p, [])) - ranks.get(p, 0) - ranks.get(p + 1, 0)
            for p in range(top + 1)}


def reduced_betti_numbers(simplices: Iterable[Iterable[int]]) -> dict[int, int]:
    b = betti_numbers(simplices)
    if b:
        b[0] -= 1
    return b


def is_acyclic(simplices: Iterable[Iterable[int]]) -> bool:
    b = reduced_betti_numbers(list(simplices))
    return bool(b) and all(v == 0 for v in b.values())
