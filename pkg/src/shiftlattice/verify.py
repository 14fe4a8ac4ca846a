"""Executable checks: interleaving bounds, lattice/span lemmas, size statistics."""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .cubical import LatticeFace, contains, face_map, opposite_facet_pairs, vertices
from .geometry import PointCloud, scale_bounds
from .lattice import GridVertex, LatticeHierarchy, build_hierarchy, locate, map_coordinate, vertex_map
from .persistence import (Barcode, bottleneck_log_by_dim, reduce, reduced_betti_numbers,
                          scale_barcode, tower_to_filtration)
from .rips import build_rips
from .spans import ActiveSet, active_vertices, is_spanned, local_span, spanned_faces
from .tower import build_tower

SQRT2 = math.sqrt(2.0)
LINF_BOUND = math.log(3 * SQRT2)


def l2_bound(d: int) -> float:
    return math.log(3 * SQRT2 * d ** 0.25)


def balance_factors(d: int, convention: str = "balanced") -> dict[str, float]:
    """Multipliers applied to tower bar endpoints before comparing with Rips.

    ``balanced`` places the complex of scale a at index sqrt(2)*a (L-inf) and
    sqrt(2)*d**0.25*a (L2), which is what the scale-balanced interleaving
    maps require.  ``literal`` uses 1/sqrt(2) and d**0.25/sqrt(2).
    """
    if convention == "balanced":
        return {"linf": SQRT2, "l2": SQRT2 * d ** 0.25}
    if convention == "literal":
        return {"linf": 1 / SQRT2, "l2": d ** 0.25 / SQRT2}
    raise ValueError(f"unknown convention {convention!r}")


# ---------------------------------------------------------------- interleaving

@dataclass
class MetricComparison:
    metric: str
    factor: float
    bound: float
    distances: dict[int, float]

    @property
    def worst(self) -> float:
        return max(self.distances.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst <= self.bound


@dataclass
class InterleavingReport:
    n: int
    d: int
    k: int
    seed: int
    convention: str
    tower_size: int
    comparisons: list[MetricComparison]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    def summary(self) -> str:
        lines = [f"n={self.n} d={self.d} k={self.k} seed={self.seed} "
                 f"convention={self.convention} tower_size={self.tower_size} "
                 f"time={self.seconds:.2f}s"]
        for c in self.comparisons:
            dists = " ".join(f"H{p}={v:.4f}" for p, v in sorted(c.distances.items()))
            lines.append(f"  {c.metric}: factor={c.factor:.6f} {dists} bound={c.bound:.4f} "
                         f"{'PASS' if c.passed else 'FAIL'}")
        return "\n".join(lines)


def tower_barcode(cloud: PointCloud, seed: int, skeleton: int) -> tuple[Barcode, LatticeHierarchy, int]:
    h = build_hierarchy(scale_bounds(cloud), cloud.dim, seed)
    t = build_tower(cloud, h, skeleton)
    return reduce(tower_to_filtration(t.events)), h, t.stats.size


def check_interleaving(cloud: PointCloud, seed: int, k: int, metrics: Sequence[str] = ("linf", "l2"),
                       convention: str = "balanced") -> InterleavingReport:
    """Compare tower and exact Rips barcodes in homology dimensions 0..k.

    Both complexes are built to dimension k+1 so homology up to k is exact.
    Vertices of the Rips filtration enter at the rescaled base scale, the
    value at which the rescaled tower's vertices appear.
    """
    t0 = time.perf_counter()
    bars, h, size = tower_barcode(cloud, seed, k + 1)
    bars = bars.restrict(k)
    factors = balance_factors(cloud.dim, convention)
    comps = []
    for m in metrics:
        fac = factors[m]
        rips = reduce(build_rips(cloud.with_metric(m), k + 1, vertex_value=h.lam * fac)).restrict(k)
        dist = bottleneck_log_by_dim(scale_barcode(bars, fac), rips, list(range(k + 1)))
        bound = LINF_BOUND if m == "linf" else l2_bound(cloud.dim)
        comps.append(MetricComparison(m, fac, bound, dist))
    return InterleavingReport(cloud.n, cloud.dim, k, seed, convention, size, comps,
                              time.perf_counter() - t0)


# ---------------------------------------------------------------- lemma checks

@dataclass
class LemmaResult:
    name: str
    cases: int = 0
    violations: int = 0
    counterexample: dict[str, Any] | None = None
    # cases that needed a homology computation (nonempty local spans)
    homology_checks: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, ok: bool, example: Callable[[], dict]) -> None:
        self.cases += 1
        if not ok:
            self.violations += 1
            if self.counterexample is None:
                self.counterexample = example()


@dataclass
class LemmaReport:
    dim: int
    trials: int
    seed: int
    results: dict[str, LemmaResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def summary(self) -> str:
        lines = [f"lemma checks d={self.dim} trials={self.trials} seed={self.seed}"]
        for r in self.results.values():
            status = "PASS" if r.passed else f"FAIL counterexample={r.counterexample}"
            extra = f" homology_checks={r.homology_checks}" if r.homology_checks else ""
            lines.append(f"  {r.name}: cases={r.cases}{extra} violations={r.violations} {status}")
        return "\n".join(lines)


def _random_hierarchy(rng: np.random.Generator, d: int, levels: int = 6) -> LatticeHierarchy:
    shifts = tuple(tuple(int(x) for x in row) for row in rng.choice([-1, 1], size=(levels, d)))
    return LatticeHierarchy(lam=1.0, s_max=levels, shifts=shifts, dim=d)


def _unit_hierarchy(sig: tuple[int, ...]) -> LatticeHierarchy:
    return LatticeHierarchy(lam=1.0, s_max=1, shifts=(sig,), dim=len(sig))


def _hier_dict(h: LatticeHierarchy) -> dict:
    return {"lam": h.lam, "s_max": h.s_max, "shifts": [list(x) for x in h.shifts], "dim": h.dim}


def vorcontain_holds(h: LatticeHierarchy, x: GridVertex) -> bool:
    """Every corner of x's Voronoi cube lies in the cube of its image (exact)."""
    y = vertex_map(h, x)
    X, Y = h.center2(x), h.center2(y)
    half_x, half_y = 1 << x.s, 1 << (x.s + 1)
    if any(abs(a - b) >= half_y for a, b in zip(X, Y)):
        return False
    for signs in itertools.product((-1, 1), repeat=h.dim):
        if any(abs(a + e * half_x - b) > half_y for a, e, b in zip(X, signs, Y)):
            return False
    return True


def gcell_holds(h: LatticeHierarchy, f: LatticeFace) -> bool:
    e = face_map(h, f)
    if {v.z for v in vertices(e)} != {vertex_map(h, v).z for v in vertices(f)}:
        return False
    if e.mask == 0:
        return True
    fpairs = opposite_facet_pairs(f) if f.mask else []
    for e1, e2 in opposite_facet_pairs(e):
        if not any(face_map(h, f1) == e1 and face_map(h, f2) == e2 for f1, f2 in fpairs):
            return False
    return True


def _random_face(rng, d: int, s: int, box: int = 40) -> LatticeFace:
    anchor = tuple(int(a) for a in rng.integers(-box, box, size=d))
    return LatticeFace(s, anchor, int(rng.integers(0, 1 << d)))


def _check_vorcontain(rng, d, trials, res):
    if d <= 3:
        for sig in itertools.product((-1, 1), repeat=d):
            h = _unit_hierarchy(sig)
            for z in itertools.product(range(-2, 2), repeat=d):
                x = GridVertex(0, z)
                res.record(vorcontain_holds(h, x), lambda: {"hierarchy": _hier_dict(h), "x": list(z)})
    for _ in range(trials):
        h = _random_hierarchy(rng, d)
        s = int(rng.integers(0, h.s_max))
        x = GridVertex(s, tuple(int(a) for a in rng.integers(-1000, 1000, size=d)))
        res.record(vorcontain_holds(h, x),
                   lambda: {"hierarchy": _hier_dict(h), "s": s, "x": list(x.z)})


def _check_gcell(rng, d, trials, res):
    if d <= 3:
        for sig in itertools.product((-1, 1), repeat=d):
            h = _unit_hierarchy(sig)
            for anchor in itertools.product((0, 1), repeat=d):
                for mask in range(1 << d):
                    f = LatticeFace(0, anchor, mask)
                    res.record(gcell_holds(h, f),
                               lambda: {"hierarchy": _hier_dict(h), "face": str(f)})
    for _ in range(trials):
        h = _random_hierarchy(rng, d)
        f = _random_face(rng, d, int(rng.integers(0, h.s_max)))
        res.record(gcell_holds(h, f), lambda: {"hierarchy": _hier_dict(h), "face": str(f)})


def _check_activeimage(rng, d, trials, res):
    while res.cases < trials:
        h = _random_hierarchy(rng, d, levels=1)
        count = int(rng.integers(1, 2 ** d + 3))
        zs = {tuple(int(a) for a in rng.integers(0, 4, size=d)) for _ in range(count)}
        V = ActiveSet(0, {z: 0 for z in zs})
        image = {tuple(map_coordinate(a, c) for a, c in zip(z, h.shift(0))) for z in zs}
        for f in spanned_faces(V):
            res.record(is_spanned(face_map(h, f), image),
                       lambda: {"hierarchy": _hier_dict(h), "V": sorted(map(list, zs)), "face": str(f)})


def _check_iripscell(rng, d, trials, res):
    while res.cases < trials:
        h = _random_hierarchy(rng, d, levels=4)
        s = int(rng.integers(0, h.s_max + 1))
        alpha = h.alpha(s)
        corner = rng.uniform(-20, 20, size=d)
        m = int(rng.integers(2, 8))
        pts = corner + rng.uniform(0, alpha, size=(m, d))
        if rng.random() < 0.3:
            # a pair at distance exactly alpha, on opposite corners of the box
            b = rng.integers(0, 2, size=d)
            pts[0] = corner + alpha * b
            pts[1] = corner + alpha * (1 - b)
        diam = max(np.abs(p - q).max() for p in pts for q in pts)
        if diam > alpha:
            continue
        zs = [locate(h, tuple(map(float, p)), s).z for p in pts]
        ok = all(max(z[i] for z in zs) - min(z[i] for z in zs) <= 1 for i in range(d))
        res.record(ok, lambda: {"hierarchy": _hier_dict(h), "s": s, "points": pts.tolist()})


def _check_gcompose(rng, d, trials, res):
    while res.cases < trials:
        n = 20
        cloud = PointCloud.from_array(rng.random((n, d)))
        seed = int(rng.integers(0, 2**31))
        h = build_hierarchy(scale_bounds(cloud), d, seed)
        for s in range(h.s_min, h.s_max):
            V = active_vertices(h, cloud, s)
            for z, rep in V.vertices.items():
                x = GridVertex(s, z)
                ok = vertex_map(h, x) == locate(h, cloud.points[rep], s + 1)
                res.record(ok, lambda: {"seed": seed, "s": s, "x": list(z),
                                        "points": [list(p) for p in cloud.points]})


def _check_uxcomplex(rng, d, trials, res):
    while res.cases < trials:
        dd = int(rng.integers(1, min(d, 4) + 1))
        full = (1 << dd) - 1
        mask = int(rng.integers(0, full + 1))
        f = LatticeFace(0, (0,) * dd, mask)
        verts = [v.z for v in vertices(LatticeFace(0, (0,) * dd, full))]
        keep = rng.random(len(verts)) < rng.uniform(0.1, 0.9)
        zs = {z for z, kz in zip(verts, keep) if kz} or {verts[int(rng.integers(len(verts)))]}
        V = ActiveSet(0, {z: 0 for z in zs})
        span = local_span(f, V)
        inside = any(contains(f, LatticeFace(0, z, 0)) for z in zs)
        if not span:
            res.record(not inside, lambda: {"face": str(f), "V": sorted(map(list, zs))})
            continue
        # relabel faces as integers for the homology computation
        ids: dict[LatticeFace, int] = {}
        simplices = [tuple(ids.setdefault(x, len(ids)) for x in fl) for fl in span]
        red = reduced_betti_numbers(simplices)
        res.homology_checks += 1
        res.record(all(v == 0 for v in red.values()),
                   lambda: {"face": str(f), "V": sorted(map(list, zs)), "betti": red})


LEMMAS = {
    "vorcontain": _check_vorcontain,
    "gcell": _check_gcell,
    "activeimage": _check_activeimage,
    "iripscell": _check_iripscell,
    "gcompose": _check_gcompose,
    "uxcomplex": _check_uxcomplex,
}


def check_lemmas(d: int, trials: int, seed: int = 0, only: Sequence[str] | None = None,
                 ux_trials: int | None = None) -> LemmaReport:
    rng = np.random.default_rng(seed)
    report = LemmaReport(d, trials, seed)
    for name, fn in LEMMAS.items():
        if only and name not in only:
            continue
        res = LemmaResult(name)
        n = trials if name != "uxcomplex" or ux_trials is None else ux_trials
        fn(rng, d, n, res)
        report.results[name] = res
    return report


# ---------------------------------------------------------------- sizes and lifetimes

@dataclass
class SurvivalResult:
    k: int
    d: int
    trials: int
    mean: float
    stderr: float

    @property
    def bound(self) -> float:
        return 3 * math.log2(self.k)

    @property
    def passed(self) -> bool:
        return self.mean <= self.bound + 3 * self.stderr


def collapse_time(rng: np.random.Generator, anchor: Sequence[int], mask: int) -> int:
    """Number of random-shift steps until the face maps to a vertex."""
    d = len(anchor)
    anchor = list(anchor)
    steps = 0
    while mask:
        signs = rng.choice([-1, 1], size=d)
        new_mask = 0
        for i in range(d):
            lo = map_coordinate(anchor[i], int(signs[i]))
            if mask >> i & 1 and map_coordinate(anchor[i] + 1, int(signs[i])) != lo:
                new_mask |= 1 << i
            anchor[i] = lo
        mask = new_mask
        steps += 1
    return steps


def survival_experiment(k: int, d: int, trials: int, seed: int = 0) -> SurvivalResult:
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    rng = np.random.default_rng(seed)
    times = []
    for _ in range(trials):
        dirs = rng.choice(d, size=k, replace=False)
        mask = sum(1 << int(i) for i in dirs)
        anchor = [int(a) for a in rng.integers(-1000, 1000, size=d)]
        times.append(collapse_time(rng, anchor, mask))
    arr = np.asarray(times, dtype=float)
    return SurvivalResult(k, d, trials, float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(trials)))


@dataclass
class SizeRow:
    n: int
    d: int
    k: int
    seed: int
    scales: int
    M: int
    vertex_includes: int
    orphan_includes: int
    mean_lifetime: float
    seconds: float

    @property
    def vertex_bound_ok(self) -> bool:
        return self.vertex_includes <= self.n * 3 ** self.d


def measure_sizes(n_list: Sequence[int], d_list: Sequence[int], k: int,
                  seeds: Sequence[int]) -> list[SizeRow]:
    rows = []
    for d in d_list:
        for n in n_list:
            for seed in seeds:
                rng = np.random.default_rng([n, d, seed])
                cloud = PointCloud.from_array(rng.random((n, d)))
                t0 = time.perf_counter()
                h = build_hierarchy(scale_bounds(cloud), d, seed)
                t = build_tower(cloud, h, k)
                dt = time.perf_counter() - t0
                ml = t.stats.mean_lifetime()
                row = SizeRow(n, d, k, seed, h.s_max + 1, t.stats.size, t.stats.vertex_includes,
                              t.stats.orphan_includes, math.nan if ml is None else ml, dt)
                if not row.vertex_bound_ok:
                    raise AssertionError(f"0-simplex inclusions exceed n*3^d: {row}")
                rows.append(row)
    return rows


def rows_to_csv(rows: Sequence[SizeRow]) -> str:
    out = io.StringIO()
    if not rows:
        return ""
    fields = list(asdict(rows[0]))
    w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(asdict(r))
    return out.getvalue()


def doubling_ratio(rows: Sequence[SizeRow], n_small: int, n_large: int) -> float:
    small = [r.M for r in rows if r.n == n_small]
    large = [r.M for r in rows if r.n == n_large]
    return float(np.mean(large) / np.mean(small))
