"""Orbit segments, periodic orbits and pseudo-orbits of a relation.

Indexing is 0-based throughout: a segment of length ``n`` is
``(x_0, ..., x_{n-1})`` with ``x_{i+1} in F(x_i)``.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidArgumentError, ResourceLimitError
from .metric_relation import Relation

__all__ = [
    "DEFAULT_CAP",
    "OrbitSegment",
    "PeriodicOrbitRecord",
    "PseudoOrbit",
    "is_orbit",
    "enumerate_partial_orbits",
    "enumerate_all_partial_orbits",
    "count_partial_orbits",
    "find_periodic_orbits",
    "is_pseudo_orbit",
    "random_orbit",
    "extend_forward",
    "extend_backward",
    "segments_to_csv",
    "segments_from_csv",
]

DEFAULT_CAP = 10**6


@dataclass(frozen=True, order=True)
class OrbitSegment:
    points: tuple

    def __post_init__(self):
        if len(self.points) < 1:
            raise InvalidArgumentError("an orbit segment has at least one point")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class PeriodicOrbitRecord:
    """A simple cycle ``cycle[0] -> cycle[1] -> ... -> cycle[-1] -> cycle[0]``."""

    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise InvalidArgumentError("empty cycle")

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def center(self) -> int:
        return self.cycle[0]

    def rotated_to(self, point: int) -> "PeriodicOrbitRecord":
        k = self.cycle.index(point)
        return PeriodicOrbitRecord(self.cycle[k:] + self.cycle[:k])

    def unroll(self, length: int) -> tuple:
        p = self.period
        return tuple(self.cycle[i % p] for i in range(length))

    def is_valid(self, F: Relation) -> bool:
        p = self.period
        return all(self.cycle[(i + 1) % p] in F(self.cycle[i]) for i in range(p))


@dataclass(frozen=True)
class PseudoOrbit:
    points: tuple
    delta: Fraction

    def __len__(self):
        return len(self.points)


def is_orbit(F: Relation, seq) -> bool:
    seq = tuple(seq)
    return all(seq[i + 1] in F(seq[i]) for i in range(len(seq) - 1))


def _walk(F: Relation, start: int, n: int, out: list, cap: int):
    # iterative DFS in lexicographic order
    path = [start]
    stack = [iter(F(start))]
    if n == 1:
        if len(out) >= cap:
            raise ResourceLimitError(f"more than {cap} orbit segments of length 1", count=len(out))
        out.append(OrbitSegment((start,)))
        return
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            path.pop()
            continue
        path.append(nxt)
        if len(path) == n:
            if len(out) >= cap:
                raise ResourceLimitError(
                    f"more than {cap} orbit segments of length {n}", count=len(out)
                )
            out.append(OrbitSegment(tuple(path)))
            path.pop()
        else:
            stack.append(iter(F(nxt)))


def enumerate_partial_orbits(F: Relation, x: int, n: int, cap: int = DEFAULT_CAP) -> list:
    """All length-``n`` segments starting at ``x``, in lexicographic order."""
    if n < 1:
        raise InvalidArgumentError("segment length must be >= 1")
    out: list = []
    _walk(F, x, n, out, cap)
    return out


def enumerate_all_partial_orbits(F: Relation, n: int, cap: int = DEFAULT_CAP) -> list:
    if n < 1:
        raise InvalidArgumentError("segment length must be >= 1")
    out: list = []
    for x in range(F.size):
        _walk(F, x, n, out, cap)
    return out


def count_partial_orbits(F: Relation, n: int, start=None) -> int:
    """``|Orb_n(F)|`` (or ``|Orb_n(F, start)|``) by dynamic programming."""
    if n < 1:
        raise InvalidArgumentError("segment length must be >= 1")
    ways = [1] * F.size
    for _ in range(n - 1):
        ways = [sum(ways[j] for j in F(i)) for i in range(F.size)]
    return ways[start] if start is not None else sum(ways)


def find_periodic_orbits(F: Relation, max_period: int, cap: int = DEFAULT_CAP) -> list:
    """Simple cycles of length <= ``max_period``, each listed once.

    Each cycle is rotated so its smallest point comes first; results are
    ordered by period, then lexicographically.
    """
    if max_period < 1:
        raise InvalidArgumentError("max_period must be >= 1")
    found = []
    for s in range(F.size):
        path = [s]
        on_path = {s}
        stack = [iter(F(s))]
        while stack:
            v = next(stack[-1], None)
            if v is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if v == s:
                found.append(PeriodicOrbitRecord(tuple(path)))
                if len(found) > cap:
                    raise ResourceLimitError(f"more than {cap} periodic orbits", count=len(found))
            elif v > s and v not in on_path and len(path) < max_period:
                path.append(v)
                on_path.add(v)
                stack.append(iter(F(v)))
    found.sort(key=lambda r: (r.period, r.cycle))
    return found


def is_pseudo_orbit(F: Relation, seq, delta):
    """Return ``(True, None)`` or ``(False, i)`` for the first bad step ``i -> i+1``.

    A step is good when ``min_{y in F(seq[i])} dist(y, seq[i+1]) < delta``.
    """
    seq = tuple(seq)
    if len(seq) < 2:
        raise InvalidArgumentError("pseudo-orbit check needs at least two points")
    delta = Fraction(delta)
    space = F.space
    for i in range(len(seq) - 1):
        if space.distance_to_set(seq[i + 1], F(seq[i])) >= delta:
            return False, i
    return True, None


def random_orbit(F: Relation, x: int, n: int, seed: int = 0) -> OrbitSegment:
    if n < 1:
        raise InvalidArgumentError("segment length must be >= 1")
    rng = random.Random(seed)
    pts = [x]
    for _ in range(n - 1):
        pts.append(rng.choice(F(pts[-1])))
    return OrbitSegment(tuple(pts))


def extend_forward(F: Relation, points, steps: int) -> tuple:
    """Append ``steps`` points, always taking the smallest successor."""
    pts = list(points)
    for _ in range(steps):
        pts.append(F(pts[-1])[0])
    return tuple(pts)


def extend_backward(F: Relation, points, steps: int) -> tuple:
    """Prepend ``steps`` points, always taking the smallest predecessor."""
    pre = F.preimages()
    pts = list(points)
    for _ in range(steps):
        if not pre[pts[0]]:
            raise InvalidArgumentError(f"point {pts[0]} has no preimage")
        pts.insert(0, pre[pts[0]][0])
    return tuple(pts)


def segments_to_csv(segments) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for seg in segments:
        writer.writerow(seg.points)
    return buf.getvalue()


def segments_from_csv(text: str) -> list:
    rows = csv.reader(line for line in io.StringIO(text) if not line.startswith("#"))
    return [OrbitSegment(tuple(int(v) for v in row)) for row in rows if row]
