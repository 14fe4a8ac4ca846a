"""Shifted dyadic lattice hierarchy.

Grid ``G_s`` has spacing ``alpha(s) = lam * 2**s`` and an offset from the origin
that is a half-integer multiple of ``lam``.  Offsets are stored as integers in
units of ``lam / 2`` so every lattice-level predicate is exact integer
arithmetic.  Only :func:`locate` and :func:`representative` touch input
coordinates, and they use exact rationals for that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import Metric, PointCloud, ScaleBounds, scale_index_ceiling

RNG_NAME = "numpy.PCG64"


class GridVertex(NamedTuple):
    s: int
    z: tuple[int, ...]


@dataclass(frozen=True)
class LatticeHierarchy:
    lam: float
    s_max: int
    shifts: tuple[tuple[int, ...], ...]
    dim: int
    seed: int | None = None
    s_min: int = 0
    off2: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if len(self.shifts) != self.s_max - self.s_min:
            raise ValueError(f"need {self.s_max - self.s_min} shift vectors, got {len(self.shifts)}")
        for sig in self.shifts:
            if len(sig) != self.dim or any(c not in (-1, 1) for c in sig):
                raise ValueError(f"bad shift vector {sig}")
        # offset(s+1) = offset(s) + alpha(s)/2 * sigma_s ; in lam/2 units: + 2**s * sigma_s
        offs = [(0,) * self.dim]
        for s, sig in zip(range(self.s_min, self.s_max), self.shifts):
            offs.append(tuple(o + (1 << s) * c for o, c in zip(offs[-1], sig)))
        object.__setattr__(self, "off2", tuple(offs))

    @property
    def scales(self) -> range:
        return range(self.s_min, self.s_max + 1)

    def alpha(self, s: int) -> float:
        return math.ldexp(self.lam, s)

    def shift(self, s: int) -> tuple[int, ...]:
        """Sign vector used to pass from scale s to s+1."""
        return self.shifts[s - self.s_min]

    def offset2(self, s: int) -> tuple[int, ...]:
        return self.off2[s - self.s_min]

    def offset(self, s: int) -> tuple[Fraction, ...]:
        """Offset of G_s from the origin, in units of lam."""
        return tuple(Fraction(o, 2) for o in self.offset2(s))

    def center2(self, v: GridVertex) -> tuple[int, ...]:
        """Embedded position of v in units of lam/2 (exact)."""
        step = 1 << (v.s + 1)
        return tuple(o + step * z for o, z in zip(self.offset2(v.s), v.z))

    def embed(self, v: GridVertex) -> tuple[float, ...]:
        return tuple(self.lam * c / 2 for c in self.center2(v))

    def header_lines(self, k: int | None = None) -> list[str]:
        head = f"# lambda={self.lam!r} seed={self.seed} d={self.dim}"
        if k is not None:
            head += f" k={k}"
        head += f" smin={self.s_min} smax={self.s_max}"
        lines = [head]
        for s in range(self.s_min, self.s_max):
            lines.append(f"# shift s={s} " + " ".join(f"{c:+d}" for c in self.shift(s)))
        return lines


def draw_shifts(num: int, dim: int, seed: int) -> tuple[tuple[int, ...], ...]:
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(num, dim))
    return tuple(tuple(int(2 * b - 1) for b in row) for row in bits)


def build_hierarchy(bounds: ScaleBounds, dim: int, seed: int) -> LatticeHierarchy:
    if not bounds.alpha0 > 0:
        raise ValueError("alpha0 must be positive")
    s_max = 0 if bounds.trivial else scale_index_ceiling(bounds.alpha0, bounds.alpham)
    return LatticeHierarchy(lam=bounds.alpha0, s_max=s_max, shifts=draw_shifts(s_max, dim, seed),
                            dim=dim, seed=seed)


def _round_half_down(t: Fraction) -> int:
    return math.ceil(t - Fraction(1, 2))


def locate(h: LatticeHierarchy, p: Sequence[float], s: int) -> GridVertex:
    """Nearest vertex of G_s to p; coordinate ties go to the smaller integer."""
    lam = Fraction(h.lam)
    step = lam * (1 << s)
    z = tuple(_round_half_down((Fraction(x) - lam * o / 2) / step)
              for x, o in zip(p, h.offset2(s)))
    return GridVertex(s, z)


def map_coordinate(z: int, sign: int) -> int:
    # 2z - sign is odd, so the rounding of (2z - sign)/4 never ties
    return (2 * z - sign + 2) // 4


def vertex_map(h: LatticeHierarchy, v: GridVertex) -> GridVertex:
    if v.s >= h.s_max:
        raise ValueError(f"no scale above {v.s}")
    sig = h.shift(v.s)
    return GridVertex(v.s + 1, tuple(map_coordinate(z, c) for z, c in zip(v.z, sig)))


def _exact_key(h: LatticeHierarchy, v: GridVertex, p: Sequence[float], metric: Metric):
    lam = Fraction(h.lam)
    diffs = [abs(Fraction(x) - lam * c / 2) for x, c in zip(p, h.center2(v))]
    if metric is Metric.LINF:
        return max(diffs)
    return sum(d * d for d in diffs)


def representative(h: LatticeHierarchy, v: GridVertex, cloud: PointCloud, s: int | None = None) -> int:
    """Id of the point closest to v among the points that locate to v."""
    s = v.s if s is None else s
    if s != v.s:
        raise ValueError("vertex scale mismatch")
    best = None
    for i, p in enumerate(cloud.points):
        if locate(h, p, s) != v:
            continue
        key = (_exact_key(h, v, p, cloud.metric), i)
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError(f"vertex {v} is not active")
    return best[1]
