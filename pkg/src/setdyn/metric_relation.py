"""Finite metric spaces and set-valued relations on them.

A :class:`MetricSpace` is an indexed point set with an exact rational
distance table. A :class:`Relation` assigns to every point a nonempty,
sorted tuple of successor indices; on a finite space this is all that is
left of an upper semi-continuous map ``F: X -> 2^X``.

Both types are frozen. Derived views such as the adjacency matrix are
recomputed on every call rather than cached.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError, PreconditionError

__all__ = [
    "MetricSpace",
    "Relation",
    "build_grid_space",
    "build_discrete_space",
    "tent_map",
    "tent_inverse_relation",
    "discretize_single_valued",
    "identity_relation",
    "full_relation",
    "constant_relation",
    "relation_from_adjacency",
    "random_relation",
    "invert",
    "is_surjective",
    "parse_adjacency_list",
    "format_adjacency_list",
]


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise InvalidArgumentError(f"refusing float {value!r}; pass an exact rational")
    return Fraction(value)


@dataclass(frozen=True)
class MetricSpace:
    """A finite metric space.

    ``coords`` is set for grid spaces on ``[0, 1]`` and is ``None`` for
    abstract spaces.
    """

    labels: tuple
    dist: tuple
    coords: tuple | None = None

    def __post_init__(self):
        n = len(self.labels)
        if n == 0:
            raise InvalidArgumentError("a metric space needs at least one point")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise InvalidArgumentError("distance table must be square and match the labels")
        for i in range(n):
            if self.dist[i][i] != 0:
                raise InvalidArgumentError(f"dist({i},{i}) must be 0")
            for j in range(i + 1, n):
                if self.dist[i][j] != self.dist[j][i]:
                    raise InvalidArgumentError(f"distance table is not symmetric at ({i},{j})")
                if self.dist[i][j] <= 0:
                    raise InvalidArgumentError(f"distinct points {i},{j} must have positive distance")

    @classmethod
    def from_matrix(cls, matrix, labels=None, check_triangle=True):
        dist = tuple(tuple(_as_fraction(v) for v in row) for row in matrix)
        if labels is None:
            labels = tuple(range(len(dist)))
        space = cls(tuple(labels), dist)
        if check_triangle:
            bad = space.triangle_violation()
            if bad is not None:
                raise InvalidArgumentError(f"triangle inequality fails for {bad}")
        return space

    def __len__(self):
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def triangle_violation(self):
        """Return a triple ``(i, j, k)`` with d(i,k) > d(i,j) + d(j,k), or None."""
        n = self.size
        for i, j, k in product(range(n), repeat=3):
            if self.dist[i][k] > self.dist[i][j] + self.dist[j][k]:
                return (i, j, k)
        return None

    def min_distance(self) -> Fraction | None:
        n = self.size
        if n < 2:
            return None
        return min(self.dist[i][j] for i in range(n) for j in range(i + 1, n))

    def diameter(self) -> Fraction:
        return max(max(row) for row in self.dist)

    def ball(self, center: int, radius) -> tuple:
        """Indices strictly within ``radius`` of ``center``."""
        radius = _as_fraction(radius)
        return tuple(j for j, dj in enumerate(self.dist[center]) if dj < radius)

    def ball_mask(self, center: int, radius) -> np.ndarray:
        radius = _as_fraction(radius)
        return np.array([dj < radius for dj in self.dist[center]], dtype=bool)

    def close_matrix(self, radius) -> np.ndarray:
        """Boolean matrix ``C[i, j] = dist(i, j) < radius``.

        Comparisons are made on the exact rationals; only the verdicts are
        stored in the array.
        """
        radius = _as_fraction(radius)
        return np.array([[dij < radius for dij in row] for row in self.dist], dtype=bool)

    def distance_to_set(self, point: int, targets) -> Fraction:
        """Point-to-set distance ``min_{y in targets} dist(point, y)``."""
        return min(self.dist[point][y] for y in targets)

    def index_of(self, coord) -> int:
        """Index of the grid point with coordinate ``coord``."""
        if self.coords is None:
            raise InvalidArgumentError("space has no coordinates")
        coord = _as_fraction(coord)
        scaled = coord * (self.size - 1)
        if scaled.denominator != 1 or not 0 <= scaled <= self.size - 1:
            raise InvalidArgumentError(f"{coord} is not a point of this grid")
        return int(scaled)


def build_grid_space(n: int) -> MetricSpace:
    """Uniform grid ``{0, 1/(n-1), ..., 1}`` with ``|x - y|``."""
    if not isinstance(n, int) or n < 2:
        raise InvalidArgumentError(f"grid needs n >= 2 points, got {n!r}")
    coords = tuple(Fraction(k, n - 1) for k in range(n))
    dist = tuple(tuple(abs(x - y) for y in coords) for x in coords)
    return MetricSpace(labels=coords, dist=dist, coords=coords)


def build_discrete_space(n: int, scale=1) -> MetricSpace:
    """``n`` points at mutual distance ``scale``."""
    if n < 1:
        raise InvalidArgumentError("need at least one point")
    scale = _as_fraction(scale)
    dist = tuple(tuple(Fraction(0) if i == j else scale for j in range(n)) for i in range(n))
    return MetricSpace(labels=tuple(range(n)), dist=dist)


@dataclass(frozen=True)
class Relation:
    """A set-valued map on a finite space, as sorted successor tuples."""

    space: MetricSpace
    images: tuple

    def __post_init__(self):
        n = self.space.size
        if len(self.images) != n:
            raise InvalidArgumentError(f"need one image per point ({n}), got {len(self.images)}")
        for i, img in enumerate(self.images):
            if not img:
                raise InvalidArgumentError(f"image of point {i} is empty")
            if tuple(sorted(set(img))) != tuple(img):
                raise InvalidArgumentError(f"image of point {i} must be a sorted tuple without repeats")
            if img[0] < 0 or img[-1] >= n:
                raise InvalidArgumentError(f"image of point {i} leaves the space")

    @classmethod
    def from_images(cls, space, images):
        return cls(space, tuple(tuple(sorted(set(int(j) for j in img))) for img in images))

    @property
    def size(self) -> int:
        return self.space.size

    def __call__(self, i: int) -> tuple:
        return self.images[i]

    def edges(self):
        for i, img in enumerate(self.images):
            for j in img:
                yield (i, j)

    def adjacency(self) -> np.ndarray:
        n = self.size
        a = np.zeros((n, n), dtype=bool)
        for i, img in enumerate(self.images):
            a[i, list(img)] = True
        return a

    def preimages(self) -> tuple:
        """``pre[x]`` is the sorted tuple of points ``y`` with ``x in F(y)``."""
        pre = [[] for _ in range(self.size)]
        for i, j in self.edges():
            pre[j].append(i)
        return tuple(tuple(p) for p in pre)

    def image_of_set(self, points) -> set:
        out = set()
        for p in points:
            out.update(self.images[p])
        return out


def tent_map(x: Fraction) -> Fraction:
    """The full tent map ``min(2x, 2 - 2x)`` on [0, 1]."""
    return min(2 * x, 2 - 2 * x)


def tent_inverse_relation(space: MetricSpace, off_grid: str = "floor") -> Relation:
    """Set-valued inverse of the tent map on a uniform grid.

    ``F(x) = {x/2, 1 - x/2}``. On a grid with spacing ``h = 1/(n-1)`` the
    point ``x/2`` is on the grid only for even multiples of ``h``; for odd
    multiples no finite grid can hold it. With ``off_grid="floor"`` such an
    ``x`` is first snapped down to ``x - h`` (the nearest even multiple
    below), so ``F(x) = {(x-h)/2, 1 - (x-h)/2}``; even multiples get their
    exact two preimages and ``F(1) = {1/2}``. ``off_grid="reject"`` raises
    instead.
    """
    if space.coords is None:
        raise InvalidArgumentError("tent_inverse_relation needs a grid space")
    n = space.size
    if n % 2 == 0:
        raise InvalidArgumentError(f"tent_inverse_relation needs an odd point count, got {n}")
    if off_grid not in ("floor", "reject"):
        raise InvalidArgumentError(f"unknown off_grid policy {off_grid!r}")
    last = n - 1
    images = []
    for k in range(n):
        if k % 2 and off_grid == "reject":
            raise InvalidArgumentError(
                f"x = {space.coords[k]}: x/2 = {space.coords[k] / 2} is not a grid point"
            )
        half = k // 2
        images.append((half, last - half))
    return Relation.from_images(space, images)


def discretize_single_valued(space: MetricSpace, f) -> Relation:
    """Wrap a single-valued grid map as a relation with singleton images.

    ``f`` is either a callable on exact coordinates returning a grid
    coordinate, or a sequence of target indices.
    """
    if callable(f):
        if space.coords is None:
            raise InvalidArgumentError("callable maps need a grid space")
        targets = [space.index_of(f(x)) for x in space.coords]
    else:
        targets = [int(t) for t in f]
        if len(targets) != space.size:
            raise InvalidArgumentError("map table must have one entry per point")
    return Relation.from_images(space, [[t] for t in targets])


def identity_relation(space: MetricSpace) -> Relation:
    return Relation.from_images(space, [[i] for i in range(space.size)])


def full_relation(space: MetricSpace) -> Relation:
    everything = list(range(space.size))
    return Relation.from_images(space, [everything] * space.size)


def constant_relation(space: MetricSpace, target: int = 0) -> Relation:
    return Relation.from_images(space, [[target]] * space.size)


def relation_from_adjacency(space: MetricSpace, matrix) -> Relation:
    matrix = np.asarray(matrix, dtype=bool)
    return Relation.from_images(space, [np.flatnonzero(row).tolist() for row in matrix])


def random_relation(space: MetricSpace, density=Fraction(1, 2), seed: int = 0,
                    surjective: bool = True) -> Relation:
    """Seeded random relation with edge probability ``density``.

    Empty rows get one random successor; with ``surjective=True`` empty
    columns get one random predecessor.
    """
    density = _as_fraction(density)
    if not 0 <= density <= 1:
        raise InvalidArgumentError("density must lie in [0, 1]")
    rng = random.Random(seed)
    n = space.size
    a = [[rng.random() < density for _ in range(n)] for _ in range(n)]
    for i in range(n):
        if not any(a[i]):
            a[i][rng.randrange(n)] = True
    if surjective:
        for j in range(n):
            if not any(a[i][j] for i in range(n)):
                a[rng.randrange(n)][j] = True
    return relation_from_adjacency(space, a)


def is_surjective(F: Relation):
    """Return ``(True, None)`` or ``(False, p)`` with ``p`` having no preimage."""
    hit = [False] * F.size
    for _, j in F.edges():
        hit[j] = True
    for p, h in enumerate(hit):
        if not h:
            return False, p
    return True, None


def invert(F: Relation) -> Relation:
    """``invert(F)(x) = {y : x in F(y)}``."""
    pre = F.preimages()
    missing = [x for x, p in enumerate(pre) if not p]
    if missing:
        raise PreconditionError(f"relation is not surjective; points without preimage: {missing}")
    return Relation(F.space, pre)


def parse_adjacency_list(text: str, space: MetricSpace) -> Relation:
    """Parse ``i : j1 j2 ...`` lines (one per point, blank lines and # comments ignored)."""
    images: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise InvalidArgumentError(f"line {lineno}, column 1: expected 'i : j1 j2 ...'")
        try:
            i = int(head)
            targets = [int(tok) for tok in tail.split()]
        except ValueError as exc:
            raise InvalidArgumentError(f"line {lineno}: {exc}") from None
        if i in images:
            raise InvalidArgumentError(f"line {lineno}: point {i} listed twice")
        images[i] = targets
    if sorted(images) != list(range(space.size)):
        raise InvalidArgumentError(f"adjacency list must cover points 0..{space.size - 1} exactly once")
    return Relation.from_images(space, [images[i] for i in range(space.size)])


def format_adjacency_list(F: Relation) -> str:
    return "".join(f"{i} : {' '.join(map(str, img))}\n" for i, img in enumerate(F.images))
