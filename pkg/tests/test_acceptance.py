"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed to the
terminal even under capture) or directly with ``python3 tests/test_acceptance.py``.
"""

import os
import subprocess
import sys
import time
from itertools import product
from math import factorial

import numpy as np
import pytest

from shiftlattice.cubical import LatticeFace, cofaces_of_vertex
from shiftlattice.geometry import PointCloud, scale_bounds
from shiftlattice.lattice import GridVertex, build_hierarchy
from shiftlattice.persistence import rank_oracle, reduce, tower_to_filtration
from shiftlattice.spans import ActiveSet, active_vertices, enumerate_active_flags
from shiftlattice.tower import build_tower, replay
from shiftlattice.verify import (LINF_BOUND, check_interleaving, check_lemmas, doubling_ratio,
                                 l2_bound, measure_sizes, survival_experiment)

# tolerances pinned from the acceptance criteria
INTERLEAVING_SECONDS = 10.0
ORACLE_SECONDS = 5.0
LEMMA_CASES = 10_000
UX_SPANS = 200
SURVIVAL_TRIALS = 1000
DOUBLING_BAND = 3.0


@pytest.fixture
def report(capsys):
    def emit(criterion: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[ACCEPTANCE] {criterion}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, f"{criterion}: {detail}"
    return emit


def _cloud(seed, n, d, metric="l2"):
    return PointCloud.from_array(np.random.default_rng(seed).random((n, d)), metric)


# ---------------------------------------------------------------- 1

def _interleaving_campaign(n, d, metric, convention):
    worst, slowest, ok = 0.0, 0.0, True
    for seed in range(10):
        r = check_interleaving(_cloud(seed, n, d), seed, 2, (metric,), convention)
        worst = max(worst, r.comparisons[0].worst)
        slowest = max(slowest, r.seconds)
        ok &= r.passed and r.seconds <= INTERLEAVING_SECONDS
    return ok, worst, slowest


@pytest.mark.parametrize("convention", ["literal", "balanced"])
def test_criterion_1_interleaving(report, convention):
    ok_inf, w_inf, t_inf = _interleaving_campaign(20, 2, "linf", convention)
    ok_l2, w_l2, t_l2 = _interleaving_campaign(15, 3, "l2", convention)
    report(f"1 interleaving ({convention} scaling)", ok_inf and ok_l2,
           f"linf d=2 n=20 worst={w_inf:.4f} <= {LINF_BOUND:.4f} slowest={t_inf:.2f}s; "
           f"l2 d=3 n=15 worst={w_l2:.4f} <= {l2_bound(3):.4f} slowest={t_l2:.2f}s")


# ---------------------------------------------------------------- 2

def test_criterion_2_oracle_equivalence(report):
    mismatches, slowest = 0, 0.0
    for seed in range(25):
        d, n, k = 1 + seed % 3, 6 + seed % 7, 1 + seed % 2
        cloud = _cloud(100 + seed, n, d)
        t0 = time.perf_counter()
        t = build_tower(cloud, build_hierarchy(scale_bounds(cloud), d, seed), k)
        same = reduce(tower_to_filtration(t.events)).multiset() == rank_oracle(t.events).multiset()
        slowest = max(slowest, time.perf_counter() - t0)
        mismatches += not same
    report("2 oracle equivalence", mismatches == 0 and slowest <= ORACLE_SECONDS,
           f"25 instances n<=12 d<=3 k<=2 mismatches={mismatches} slowest={slowest:.2f}s")


# ---------------------------------------------------------------- 3

def test_criterion_3_tower_correctness(report):
    mismatches, scales = 0, 0
    for seed in range(25):
        d, n, k = 1 + seed % 3, 6 + seed, 2 + seed % 2
        cloud = _cloud(seed, n, d)
        h = build_hierarchy(scale_bounds(cloud), d, seed)
        t = build_tower(cloud, h, k, keep_face_ids=True)
        for s in h.scales:
            ids = t.face_ids[s]
            direct = {frozenset(ids[f] for f in fl)
                      for fl in enumerate_active_flags(active_vertices(h, cloud, s), k)}
            mismatches += replay(t.events, h.alpha(s)).simplices != direct
            scales += 1
    report("3 tower correctness", mismatches == 0,
           f"25 instances n<=30 d<=3 k<=3, {scales} scales compared, mismatches={mismatches}")


# ---------------------------------------------------------------- 4

def test_criterion_4_lemmas(report):
    totals: dict[str, int] = {}
    violations: dict[str, int] = {}
    ux_spans = 0
    for d in (1, 2, 3, 4):
        rep = check_lemmas(d, LEMMA_CASES if d in (3, 4) else LEMMA_CASES // 4, seed=d)
        for name, r in rep.results.items():
            totals[name] = totals.get(name, 0) + r.cases
            violations[name] = violations.get(name, 0) + r.violations
            ux_spans += r.homology_checks
    ok = (all(v == 0 for v in violations.values()) and all(c >= LEMMA_CASES for c in totals.values())
          and ux_spans >= UX_SPANS)
    detail = " ".join(f"{k}={totals[k]}/{violations[k]}" for k in totals)
    report("4 lemma suites", ok, f"cases/violations: {detail}; nonempty local spans={ux_spans}")


# ---------------------------------------------------------------- 5

def _stirling2(n, k):
    if n == k:
        return 1
    if k == 0:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def test_criterion_5_counting(report):
    square = ActiveSet(0, {z: 0 for z in product((0, 1), repeat=2)})
    lengths = [len(fl) for fl in enumerate_active_flags(square, 2)]
    sub = (lengths.count(1), lengths.count(2), lengths.count(3))
    ok = sub == (9, 16, 8)
    for d in range(1, 5):
        cube = LatticeFace(0, (0,) * d, (1 << d) - 1)
        flags = enumerate_active_flags(ActiveSet(0, {z: 0 for z in product((0, 1), repeat=d)}), d)
        for k in range(1, d + 1):
            n = sum(1 for fl in flags if len(fl) == k + 1 and fl[0] == LatticeFace(0, (0,) * d, 0)
                    and fl[-1] == cube)
            ok &= n == factorial(k) * _stirling2(d, k)
    cof = [len(cofaces_of_vertex(GridVertex(0, (0,) * d))) for d in range(1, 7)]
    ok &= cof == [3 ** d for d in range(1, 7)]
    report("5 counting", ok, f"square subdivision={sub}; Stirling chains d<=4 checked; cofaces={cof}")


# ---------------------------------------------------------------- 6

def test_criterion_6_sizes_and_lifetimes(report):
    rows = measure_sizes([100, 200], [2], 2, range(5))
    rows += measure_sizes([10, 30], [1, 3], 2, range(3))
    vertex_ok = all(r.vertex_includes <= r.n * 3 ** r.d for r in rows)
    ratio = doubling_ratio([r for r in rows if r.d == 2], 100, 200)
    surv = [survival_experiment(k, d, SURVIVAL_TRIALS, seed=k) for k, d in ((4, 4), (8, 8))]
    ok = vertex_ok and ratio <= DOUBLING_BAND and all(s.passed for s in surv)
    lt = " ".join(f"(k={s.k},d={s.d}) mean={s.mean:.3f}+-{s.stderr:.3f} <= {s.bound:.1f}" for s in surv)
    report("6 size/lifetime", ok,
           f"vertex inclusions <= n*3^d on {len(rows)} runs: {vertex_ok}; "
           f"M ratio 100->200 = {ratio:.3f} <= {DOUBLING_BAND}; {lt}")


# ---------------------------------------------------------------- 7

_PIPELINE = """
import hashlib, sys
import numpy as np
from shiftlattice.geometry import PointCloud, scale_bounds
from shiftlattice.lattice import build_hierarchy
from shiftlattice.persistence import reduce, tower_to_filtration
from shiftlattice.tower import build_tower
cloud = PointCloud.from_array(np.random.default_rng(7).random((25, 3)))
t = build_tower(cloud, build_hierarchy(scale_bounds(cloud), 3, 12345), 2)
text = t.to_text() + reduce(tower_to_filtration(t.events)).to_text()
print(hashlib.sha256(text.encode()).hexdigest())
"""


def test_criterion_7_determinism(report):
    digests = []
    for hashseed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        out = subprocess.run([sys.executable, "-c", _PIPELINE], env=env, capture_output=True,
                             text=True, check=True)
        digests.append(out.stdout.strip())
    report("7 determinism", digests[0] == digests[1] and len(digests[0]) == 64,
           f"two processes (different hash seeds) sha256 {digests[0][:16]} / {digests[1][:16]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
