"""Multiplicative comparison of barcodes: bottleneck distance on log scales."""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .reduction import Bar, Barcode


def scale_barcode(b: Barcode, factor: float) -> Barcode:
    if not factor > 0:
        raise ValueError("scale factor must be positive")
    return Barcode([Bar(x.dim, x.birth * factor, x.death * factor) for x in b.bars])


def _log_points(bars: list[Bar]) -> tuple[list[tuple[float, float]], list[float]]:
    finite, essential = [], []
    for b in bars:
        if not b.birth > 0:
            raise ValueError(f"log-scale comparison needs positive births, got {b}")
        if b.finite:
            if b.death > b.birth:
                finite.append((math.log(b.birth), math.log(b.death)))
        else:
            essential.append(math.log(b.birth))
    return finite, essential


def _feasible(A, B, t: float) -> bool:
    m, n = len(A), len(B)
    rows, cols = [], []
    # left: A then diagonal copies of B; right: B then diagonal copies of A
    for i, (ax, ay) in enumerate(A):
        for j, (bx, by) in enumerate(B):
            if max(abs(ax - bx), abs(ay - by)) <= t:
                rows.append(i)
                cols.append(j)
        if (ay - ax) / 2 <= t:
            rows.append(i)
            cols.append(n + i)
    for j, (bx, by) in enumerate(B):
        if (by - bx) / 2 <= t:
            rows.append(m + j)
            cols.append(j)
        for i in range(m):
            rows.append(m + j)
            cols.append(n + i)
    size = m + n
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool((match >= 0).all())


def finite_bottleneck(A: list[tuple[float, float]], B: list[tuple[float, float]]) -> float:
    """Bottleneck distance (L-infinity ground metric) between two finite diagrams."""
    if not A and not B:
        return 0.0
    cands = {(y - x) / 2 for x, y in A} | {(y - x) / 2 for x, y in B}
    cands |= {max(abs(ax - bx), abs(ay - by)) for ax, ay in A for bx, by in B}
    cands = sorted(cands)
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(A, B, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def bottleneck_log_by_dim(b1: Barcode, b2: Barcode, dims=None) -> dict[int, float]:
    if dims is None:
        dims = sorted(set(b1.dims()) | set(b2.dims()))
    out = {}
    for d in dims:
        A, ea = _log_points(b1.in_dim(d))
        B, eb = _log_points(b2.in_dim(d))
        if len(ea) != len(eb):
            out[d] = math.inf
            continue
        # sorted order is optimal for bottleneck matching on a line
        ess = max((abs(x - y) for x, y in zip(sorted(ea), sorted(eb))), default=0.0)
        out[d] = max(ess, finite_bottleneck(A, B))
    return out


def bottleneck_log(b1: Barcode, b2: Barcode, dim: int | None = None) -> float:
    """Bottleneck distance between (ln birth, ln death) diagrams.

    With ``dim`` given only that homology dimension is compared; otherwise
    the maximum over all dimensions is returned.  A mismatch in the number
    of essential bars yields ``inf``.
    """
    per = bottleneck_log_by_dim(b1, b2, None if dim is None else [dim])
    return max(per.values(), default=0.0)
