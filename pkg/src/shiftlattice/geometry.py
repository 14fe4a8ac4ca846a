"""Point clouds, metrics, and the scale range of the approximation tower."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputError

_SPLIT = re.compile(r"[\s,]+")


class Metric(str, enum.Enum):
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, value: "str | Metric") -> "Metric":
        if isinstance(value, Metric):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise InputError(f"unknown metric {value!r} (expected l2 or linf)") from None


@dataclass(frozen=True)
class PointCloud:
    """An ordered set of distinct points; a point's id is its index."""

    points: tuple[tuple[float, ...], ...]
    metric: Metric = Metric.L2

    def __post_init__(self):
        if not self.points:
            raise InputError("point cloud is empty")
        d = len(self.points[0])
        if d == 0:
            raise InputError("points must have at least one coordinate")
        for i, p in enumerate(self.points):
            if len(p) != d:
                raise InputError(f"point {i} has {len(p)} coordinates, expected {d}")
        seen: dict[tuple[float, ...], int] = {}
        for i, p in enumerate(self.points):
            if p in seen:
                raise InputError(f"duplicate point: ids {seen[p]} and {i} coincide at {p}")
            seen[p] = i

    @classmethod
    def from_array(cls, arr, metric: "str | Metric" = Metric.L2) -> "PointCloud":
        a = np.asarray(arr, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        return cls(tuple(tuple(float(x) for x in row) for row in a), Metric.parse(metric))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def dist(self, i: int, j: int) -> float:
        return distance(self.points[i], self.points[j], self.metric)

    def with_metric(self, metric: "str | Metric") -> "PointCloud":
        return PointCloud(self.points, Metric.parse(metric))


def distance(p: Sequence[float], q: Sequence[float], metric: Metric = Metric.L2) -> float:
    if metric is Metric.LINF:
        return max(abs(a - b) for a, b in zip(p, q))
    return math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(p, q)))


def pairwise_distances(cloud: PointCloud) -> np.ndarray:
    a = cloud.array()
    diff = np.abs(a[:, None, :] - a[None, :, :])
    if cloud.metric is Metric.LINF:
        return diff.max(axis=2)
    return np.sqrt((diff**2).sum(axis=2))


def load_points(path: "str | Path", metric: "str | Metric" = Metric.L2) -> PointCloud:
    """Parse a point file: one point per line, whitespace or comma separated, '#' comments."""
    text = Path(path).read_text(encoding="utf-8")
    rows: list[tuple[float, ...]] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        try:
            row = tuple(float(t) for t in tokens)
        except ValueError:
            raise InputError(f"line {lineno}: non-numeric token in {line!r}") from None
        if any(not math.isfinite(x) for x in row):
            raise InputError(f"line {lineno}: non-finite coordinate")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"line {lineno}: ragged row ({len(row)} values, expected {width})")
        rows.append(row)
    if not rows:
        raise InputError(f"{path}: no points")
    return PointCloud(tuple(rows), Metric.parse(metric))


def write_points(path: "str | Path", cloud: PointCloud) -> None:
    lines = [" ".join(repr(x) for x in p) for p in cloud.points]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def closest_pair(cloud: PointCloud) -> tuple[float, int, int]:
    """Exact closest pair by exhaustive scan; returns (distance, i, j) with i < j."""
    if cloud.n < 2:
        raise InputError("closest pair needs at least two points")
    best = (math.inf, -1, -1)
    for i in range(cloud.n):
        for j in range(i + 1, cloud.n):
            dij = cloud.dist(i, j)
            if dij < best[0]:
                best = (dij, i, j)
    return best


def diameter(cloud: PointCloud, exact: bool = False) -> float:
    """Diameter of the cloud.

    By default this is the 2-approximation 2 * max_q |p0 - q| from the first
    point, which lies in [diam, 2 diam].
    """
    if exact:
        return max((cloud.dist(i, j) for i in range(cloud.n) for j in range(i + 1, cloud.n)),
                   default=0.0)
    return 2 * max(cloud.dist(0, j) for j in range(cloud.n))


@dataclass(frozen=True)
class ScaleBounds:
    cp: float
    diam_est: float
    spread: float
    alpha0: float
    alpham: float
    dim: int
    trivial: bool = False

    @property
    def num_scales(self) -> int:
        """Number of scale indices 0..s_max covered by the tower."""
        return scale_index_ceiling(self.alpha0, self.alpham) + 1


def scale_index_ceiling(alpha0: float, alpham: float) -> int:
    """Smallest s >= 0 with alpha0 * 2**s >= alpham."""
    if alpham <= alpha0:
        return 0
    s = max(0, math.ceil(math.log2(alpham / alpha0)))
    while s > 0 and math.ldexp(alpha0, s - 1) >= alpham:
        s -= 1
    while math.ldexp(alpha0, s) < alpham:
        s += 1
    return s


def scale_bounds(cloud: PointCloud, exact_diameter: bool = False) -> ScaleBounds:
    d = cloud.dim
    if cloud.n == 1:
        # single vertex, one scale; the unit base scale is arbitrary
        return ScaleBounds(cp=math.nan, diam_est=0.0, spread=1.0, alpha0=1.0, alpham=1.0,
                           dim=d, trivial=True)
    cp, _, _ = closest_pair(cloud)
    diam_est = diameter(cloud, exact=exact_diameter)
    alpha0 = cp / (3 * d)
    return ScaleBounds(cp=cp, diam_est=diam_est, spread=diam_est / cp, alpha0=alpha0,
                       alpham=max(diam_est, alpha0), dim=d)
