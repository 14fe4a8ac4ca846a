"""Exact Vietoris-Rips filtrations, the reference side of interleaving checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import BudgetError, InputError
from .geometry import PointCloud, pairwise_distances, scale_bounds

DEFAULT_BUDGET = 2_000_000


@dataclass
class FilteredComplex:
    """Simplices as sorted vertex tuples with filtration values, in filtration order."""

    simplices: list[tuple[tuple[int, ...], float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    def sort(self) -> "FilteredComplex":
        self.simplices.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
        return self

    def values(self) -> dict[tuple[int, ...], float]:
        return {s: v for s, v in self.simplices}

    def validate(self) -> None:
        """Check closure under faces and monotone values along filtration order."""
        pos: dict[tuple[int, ...], int] = {}
        for idx, (s, v) in enumerate(self.simplices):
            if s in pos:
                raise InputError(f"simplex {s} listed twice")
            if len(s) > 1:
                for j in range(len(s)):
                    face = s[:j] + s[j + 1:]
                    if face not in pos:
                        raise InputError(f"face {face} of {s} missing or later in order")
                    if self.simplices[pos[face]][1] > v:
                        raise InputError(f"face {face} has larger value than {s}")
            pos[s] = idx


def build_rips(cloud: PointCloud, max_dim: int, alpha_max: float = math.inf,
               vertex_value: float | None = None, budget: int = DEFAULT_BUDGET) -> FilteredComplex:
    """All simplices of dimension <= max_dim with diameter <= alpha_max.

    Edges and higher simplices carry their exact diameter.  Vertices enter at
    ``vertex_value`` (default: the base scale closest-pair/(3d), so every
    value is positive).
    """
    n = cloud.n
    if vertex_value is None:
        vertex_value = scale_bounds(cloud).alpha0
    if max_dim >= 1:
        estimate = sum(math.comb(n, j + 1) for j in range(max_dim + 1))
        if estimate > budget and math.isinf(alpha_max):
            raise BudgetError(f"Rips complex may have {estimate} simplices (budget {budget})")
    D = pairwise_distances(cloud)
    out: list[tuple[tuple[int, ...], float]] = [((i,), vertex_value) for i in range(n)]
    # lower neighbours give each simplex exactly one expansion path
    nbrs = [[j for j in range(i) if D[i, j] <= alpha_max] for i in range(n)]
    nbr_sets = [set(x) for x in nbrs]
    level = []
    for i in range(n):
        for j in nbrs[i]:
            simplex = (j, i)
            level.append((simplex, max(float(D[i, j]), vertex_value), nbr_sets[j] & nbr_sets[i]))
    for dim in range(1, max_dim + 1):
        out.extend((s, v) for s, v, _ in level)
        if len(out) > budget:
            raise BudgetError(f"Rips complex exceeds budget of {budget} simplices")
        if dim == max_dim:
            break
        nxt = []
        for simplex, value, common in level:
            # common: vertices below simplex[0] adjacent to all members
            for w in sorted(common):
                new_val = max(value, max(float(D[w, u]) for u in simplex))
                nxt.append(((w,) + simplex, new_val, common & nbr_sets[w]))
        level = nxt
    fc = FilteredComplex(out)
    return fc.sort()


def write_filtration(path: "str | Path", fc: FilteredComplex) -> None:
    lines = [f"{v!r} {len(s) - 1} " + " ".join(map(str, s)) for s, v in fc.simplices]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def parse_filtration(lines: Iterable[str]) -> FilteredComplex:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            value, dim = float(parts[0]), int(parts[1])
            verts = tuple(sorted(int(x) for x in parts[2:]))
        except (ValueError, IndexError):
            raise InputError(f"line {lineno}: cannot parse {line!r}") from None
        if len(verts) != dim + 1:
            raise InputError(f"line {lineno}: dimension {dim} with {len(verts)} vertices")
        out.append((verts, value))
    fc = FilteredComplex(out).sort()
    fc.validate()
    return fc


def read_filtration(path: "str | Path") -> FilteredComplex:
    return parse_filtration(Path(path).read_text(encoding="utf-8").splitlines())
