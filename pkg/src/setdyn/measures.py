"""Exact probability measures on finite spaces and their invariance.

A measure ``mu`` is invariant for ``F`` when ``mu(B) <= mu(F^-1(B))`` for
every ``B``, with ``F^-1(B) = {y : F(y) meets B}``. Two checks are offered:
subset enumeration (the ground truth, exponential) and a flow test. The
inequality for all ``B`` is Hall's condition for moving the mass at each
``y`` onto ``F(y)`` so that every ``x`` receives ``mu(x)``, which is a
max-flow question on the graph of ``F``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import networkx as nx

from .errors import InvalidArgumentError, PreconditionError, ResourceLimitError
from .metric_relation import Relation
from .orbits import PeriodicOrbitRecord

__all__ = [
    "FiniteMeasure",
    "EXHAUSTIVE_LIMIT",
    "periodic_measure",
    "measure_of_set",
    "preimage_set",
    "is_invariant_exhaustive",
    "is_invariant_flow",
    "mix_measures",
    "full_support_measure",
    "full_support_coefficients",
    "support",
]

EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class FiniteMeasure:
    weights: tuple

    def __post_init__(self):
        if any(isinstance(w, float) for w in self.weights):
            raise InvalidArgumentError("weights must be exact rationals")
        if any(Fraction(w) < 0 for w in self.weights):
            raise InvalidArgumentError("weights must be nonnegative")
        if sum(Fraction(w) for w in self.weights) != 1:
            raise InvalidArgumentError("weights must sum to exactly 1")

    @classmethod
    def from_weights(cls, weights):
        return cls(tuple(Fraction(w) for w in weights))

    @classmethod
    def point_mass(cls, size: int, point: int):
        return cls(tuple(Fraction(int(i == point)) for i in range(size)))

    @property
    def size(self) -> int:
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def to_json(self) -> str:
        return json.dumps(
            {str(i): f"{w.numerator}/{w.denominator}" for i, w in enumerate(self.weights)},
            sort_keys=False,
        )

    @classmethod
    def from_json(cls, text: str, size: int | None = None):
        raw = json.loads(text) if isinstance(text, str) else text
        pairs = {int(k): Fraction(v) for k, v in raw.items()}
        n = size if size is not None else max(pairs) + 1
        return cls(tuple(pairs.get(i, Fraction(0)) for i in range(n)))


def periodic_measure(orbit: PeriodicOrbitRecord, size: int) -> FiniteMeasure:
    """Uniform weight on one period: each visit contributes ``1/p``."""
    counts = [0] * size
    for p in orbit.cycle:
        counts[p] += 1
    return FiniteMeasure(tuple(Fraction(c, orbit.period) for c in counts))


def measure_of_set(mu: FiniteMeasure, B) -> Fraction:
    return sum((mu.weights[b] for b in set(B)), Fraction(0))


def preimage_set(F: Relation, B) -> set:
    B = set(B)
    return {y for y in range(F.size) if B.intersection(F(y))}


def support(mu: FiniteMeasure) -> set:
    return {i for i, w in enumerate(mu.weights) if w > 0}


def _integer_weights(mu: FiniteMeasure):
    scale = math.lcm(*(w.denominator for w in mu.weights))
    return [int(w * scale) for w in mu.weights], scale


def is_invariant_exhaustive(mu: FiniteMeasure, F: Relation):
    """Check the inequality on every subset.

    Returns ``(True, None)`` or ``(False, B)`` with ``B`` a violating set of
    least cardinality, lexicographically first among those.
    """
    n = F.size
    if mu.size != n:
        raise InvalidArgumentError("measure and relation live on different spaces")
    if n > EXHAUSTIVE_LIMIT:
        raise ResourceLimitError(
            f"exhaustive check is limited to {EXHAUSTIVE_LIMIT} points; use is_invariant_flow",
            count=n,
        )
    w, _ = _integer_weights(mu)
    pre_mask = [0] * n
    for y in range(n):
        for x in F(y):
            pre_mask[x] |= 1 << y
    for size in range(1, n + 1):
        for B in combinations(range(n), size):
            mass = sum(w[b] for b in B)
            if mass == 0:
                continue
            pre = 0
            for b in B:
                pre |= pre_mask[b]
            pre_mass = 0
            while pre:
                low = pre & -pre
                pre_mass += w[low.bit_length() - 1]
                pre ^= low
            if mass > pre_mass:
                return False, set(B)
    return True, None


def is_invariant_flow(mu: FiniteMeasure, F: Relation) -> bool:
    """Feasibility of the transport from ``mu`` on ``y`` to ``mu`` on ``F(y)``.

    Capacities are scaled to integers by the common denominator, so the
    max-flow value is exact.
    """
    if mu.size != F.size:
        raise InvalidArgumentError("measure and relation live on different spaces")
    w, scale = _integer_weights(mu)
    g = nx.DiGraph()
    g.add_node("s")
    g.add_node("t")
    for y in range(F.size):
        if w[y]:
            g.add_edge("s", ("out", y), capacity=w[y])
            for x in F(y):
                if w[x]:
                    g.add_edge(("out", y), ("in", x))
    for x in range(F.size):
        if w[x]:
            g.add_edge(("in", x), "t", capacity=w[x])
    value = nx.maximum_flow_value(g, "s", "t")
    return value == scale


def mix_measures(nu: FiniteMeasure, mu: FiniteMeasure, epsilon) -> FiniteMeasure:
    """``(1 - eps) * nu + eps * mu``."""
    if isinstance(epsilon, float):
        raise InvalidArgumentError("epsilon must be an exact rational")
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise InvalidArgumentError("epsilon must lie strictly between 0 and 1")
    if nu.size != mu.size:
        raise InvalidArgumentError("measures live on different spaces")
    return FiniteMeasure(tuple((1 - eps) * a + eps * b for a, b in zip(nu.weights, mu.weights)))


def full_support_coefficients(m: int) -> tuple:
    """``2^-1, ..., 2^-(m-1)`` followed by ``2^-(m-1)`` again, so they sum to 1."""
    if m < 1:
        raise InvalidArgumentError("need at least one orbit")
    coeffs = [Fraction(1, 2**i) for i in range(1, m)]
    coeffs.append(Fraction(1, 2 ** (m - 1)))
    return tuple(coeffs)


def full_support_measure(F: Relation, cover) -> FiniteMeasure:
    """Dyadic mixture of the periodic measures of ``cover``.

    The cover's cycles must visit every point; the result then charges every
    point and is invariant.
    """
    cover = list(cover)
    if not cover:
        raise PreconditionError("cover is empty")
    for rec in cover:
        if not rec.is_valid(F):
            raise PreconditionError(f"{rec.cycle} is not a cycle of the relation")
    visited = {p for rec in cover for p in rec.cycle}
    missed = sorted(set(range(F.size)) - visited)
    if missed:
        raise PreconditionError(f"cover misses points {missed}")
    coeffs = full_support_coefficients(len(cover))
    weights = [Fraction(0)] * F.size
    for c, rec in zip(coeffs, cover):
        for i, v in enumerate(periodic_measure(rec, F.size).weights):
            weights[i] += c * v
    return FiniteMeasure(tuple(weights))
