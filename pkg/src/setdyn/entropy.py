"""Spanning and separated cardinalities of orbit-segment families.

Two segments are *eps-close* when every coordinate pair is at distance
``< eps``. A spanning set is a dominating set of the eps-closeness graph on
``Orb_n(F)`` and a separated set is an independent set of it, so

* ``r_n(eps)`` is a minimum dominating set (solved as set cover), and
* ``s_n(eps)`` is a maximum independent set,

both by branch and bound on Python-int bitsets, one connected component at
a time. Exact mode is gated at :data:`EXACT_LIMIT` segments.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .metric_relation import MetricSpace, Relation
from .orbits import DEFAULT_CAP, OrbitSegment, count_partial_orbits, enumerate_all_partial_orbits

__all__ = [
    "EXACT_LIMIT",
    "CardinalityResult",
    "EntropyRow",
    "EntropyTable",
    "closeness_matrix",
    "is_spanning_set",
    "is_separated_set",
    "min_spanning_cardinality",
    "max_separated_cardinality",
    "verify_sandwich",
    "entropy_estimate_table",
]

EXACT_LIMIT = 4096
DEFAULT_NODE_LIMIT = 2_000_000


@dataclass(frozen=True)
class CardinalityResult:
    count: int
    certificate: tuple
    mode: str
    n: int
    epsilon: Fraction


def _segments_array(segments) -> np.ndarray:
    return np.array([s.points for s in segments], dtype=np.intp).reshape(len(segments), -1)


def closeness_matrix(space: MetricSpace, segments, eps) -> np.ndarray:
    """``S[a, b]`` is True iff segments a and b are coordinatewise ``< eps`` apart."""
    segs = _segments_array(segments)
    close = space.close_matrix(eps)
    acc = np.ones((len(segs), len(segs)), dtype=bool)
    for k in range(segs.shape[1]):
        col = segs[:, k]
        acc &= close[col[:, None], col[None, :]]
    return acc


def is_spanning_set(space: MetricSpace, universe, chosen, eps) -> bool:
    """Every segment of ``universe`` is coordinatewise ``< eps`` from some chosen one."""
    eps = Fraction(eps)
    if not chosen:
        return not universe
    # table built straight from the distances, not from the solver's graph
    n = space.size
    close = np.array([[space.d(i, j) < eps for j in range(n)] for i in range(n)], dtype=bool)
    u = _segments_array(universe)
    c = _segments_array(chosen)
    ok = np.ones((len(u), len(c)), dtype=bool)
    for k in range(u.shape[1]):
        ok &= close[u[:, k][:, None], c[:, k][None, :]]
    return bool(ok.any(axis=1).all())


def is_separated_set(space: MetricSpace, chosen, eps) -> bool:
    """Every pair in ``chosen`` differs by ``>= eps`` in at least one coordinate."""
    eps = Fraction(eps)
    chosen = list(chosen)
    if len({len(c) for c in chosen}) > 1:
        return False
    if len(chosen) < 2:
        return True
    n = space.size
    far = np.array([[space.d(i, j) >= eps for j in range(n)] for i in range(n)], dtype=bool)
    c = _segments_array(chosen)
    for start in range(0, len(c), 512):
        block = c[start : start + 512]
        apart = np.zeros((len(block), len(c)), dtype=bool)
        for k in range(c.shape[1]):
            apart |= far[block[:, k][:, None], c[:, k][None, :]]
        rows = np.arange(len(block))
        apart[rows, start + rows] = True
        if not apart.all():
            return False
    return True


# -- bitset helpers ---------------------------------------------------------

def _bitsets(matrix: np.ndarray) -> list:
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _components(nbr: list) -> list:
    seen = 0
    comps = []
    for v in range(len(nbr)):
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = comp
        while frontier:
            grow = 0
            for u in _bits(frontier):
                grow |= nbr[u]
            frontier = grow & ~comp
            comp |= frontier
        seen |= comp
        comps.append(comp)
    return comps


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.limit:
            raise ResourceLimitError(
                f"branch and bound exceeded {self.limit} nodes", count=self.nodes
            )


class _deep_recursion:
    def __init__(self, depth):
        self.depth = depth

    def __enter__(self):
        self.old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.old, self.depth))

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


# -- minimum dominating set ---------------------------------------------------

def _greedy_dominating(closed: list, comp: int) -> list:
    undominated = comp
    chosen = []
    while undominated:
        best_v, best_gain = -1, -1
        for v in _bits(comp):
            gain = (closed[v] & undominated).bit_count()
            if gain > best_gain:
                best_v, best_gain = v, gain
        chosen.append(best_v)
        undominated &= ~closed[best_v]
    return chosen


def _packing_bound(closed: list, undominated: int, cands: int) -> int:
    # vertices whose candidate dominator sets are pairwise disjoint each need their own dominator
    order = sorted(_bits(undominated), key=lambda u: (closed[u] & cands).bit_count())
    used = 0
    count = 0
    for u in order:
        cu = closed[u] & cands
        if not cu & used:
            count += 1
            used |= cu
    return count


def _cover_reduce(closed: list, undominated: int, cands: int, chosen: list):
    """Set-cover reductions; returns the reduced state or None if infeasible."""
    changed = True
    while changed:
        changed = False
        # a point whose dominators all dominate w makes w redundant
        for u in _bits(undominated):
            if not undominated >> u & 1:
                continue
            cu = closed[u] & cands
            if not cu:
                return None
            if not cu & (cu - 1):
                w = cu.bit_length() - 1
                chosen.append(w)
                undominated &= ~closed[w]
                cands &= ~(1 << w)
                changed = True
                continue
            for w in _bits(undominated & ~(1 << u)):
                if not cu & ~closed[w]:
                    undominated &= ~(1 << w)
                    changed = True
        # a candidate covering a subset of another's coverage is never needed
        for v in _bits(cands):
            if not cands >> v & 1:
                continue
            cov = closed[v] & undominated
            if not cov:
                cands &= ~(1 << v)
                changed = True
                continue
            for w in _bits(cands & ~(1 << v)):
                if not cov & ~closed[w]:
                    cands &= ~(1 << v)
                    changed = True
                    break
    return undominated, cands


def _min_dominating(closed: list, comp: int, budget: _Budget) -> list:
    best = _greedy_dominating(closed, comp)
    if _packing_bound(closed, comp, comp) == len(best):
        return best
    best_holder = [best]

    def rec(undominated, cands, chosen):
        budget.tick()
        mark = len(chosen)
        state = _cover_reduce(closed, undominated, cands, chosen)
        if state is not None:
            undominated, cands = state
            if not undominated:
                if len(chosen) < len(best_holder[0]):
                    best_holder[0] = list(chosen)
            elif len(chosen) + _packing_bound(closed, undominated, cands) < len(best_holder[0]):
                pick_opts = min(
                    (closed[u] & cands for u in _bits(undominated)), key=int.bit_count
                )
                order = sorted(
                    _bits(pick_opts), key=lambda w: -(closed[w] & undominated).bit_count()
                )
                for w in order:
                    chosen.append(w)
                    rec(undominated & ~closed[w], cands & ~(1 << w), chosen)
                    chosen.pop()
                    cands &= ~(1 << w)
        del chosen[mark:]

    with _deep_recursion(comp.bit_count() + 500):
        rec(comp, comp, [])
    return best_holder[0]


# -- maximum independent set --------------------------------------------------

def _greedy_independent(nbr: list, comp: int) -> list:
    remaining = comp
    chosen = []
    while remaining:
        v = min(_bits(remaining), key=lambda u: (nbr[u] & remaining).bit_count())
        chosen.append(v)
        remaining &= ~(nbr[v] | (1 << v))
    return chosen


def _color_classes(sep: list, P: int):
    # greedy colouring of the separation graph; a colour class is a set of pairwise close segments
    order, colors = [], []
    k = 0
    while P:
        k += 1
        Q = P
        while Q:
            v = (Q & -Q).bit_length() - 1
            Q &= ~sep[v] & ~(1 << v)
            P &= ~(1 << v)
            order.append(v)
            colors.append(k)
    return order, colors


def _dominance_reduce(closed: list, P: int) -> int:
    # if N[u] is inside N[v] for close u, v then some maximum independent set avoids v
    changed = True
    while changed:
        changed = False
        for v in _bits(P):
            if not P >> v & 1:
                continue
            nv = closed[v] & P
            for u in _bits(nv & ~(1 << v)):
                if not closed[u] & P & ~nv:
                    P &= ~(1 << v)
                    changed = True
                    break
    return P


def _max_independent(nbr: list, comp: int, budget: _Budget) -> list:
    closed = [c | (1 << v) for v, c in enumerate(nbr)]
    sep = [comp & ~closed[v] for v in range(len(nbr))]
    best_holder = [_greedy_independent(nbr, comp)]

    def rec(P, chosen):
        budget.tick()
        P = _dominance_reduce(closed, P)
        taken = 0
        for v in _bits(P):
            if not nbr[v] & P:
                chosen.append(v)
                taken += 1
                P &= ~(1 << v)
        if not P:
            if len(chosen) > len(best_holder[0]):
                best_holder[0] = list(chosen)
        else:
            order, colors = _color_classes(sep, P)
            if len(chosen) + colors[-1] > len(best_holder[0]):
                v = max(_bits(P), key=lambda u: (nbr[u] & P).bit_count())
                chosen.append(v)
                rec(P & ~closed[v], chosen)
                chosen.pop()
                rec(P & ~(1 << v), chosen)
        if taken:
            del chosen[-taken:]

    with _deep_recursion(comp.bit_count() + 500):
        rec(comp, [])
    return best_holder[0]


# -- public solvers -----------------------------------------------------------

def _orbits_for(F: Relation, n: int, mode: str, cap: int) -> list:
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if mode not in ("exact", "greedy"):
        raise InvalidArgumentError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    total = count_partial_orbits(F, n)
    if total > cap:
        raise ResourceLimitError(f"|Orb_{n}| = {total} exceeds the enumeration cap {cap}", count=total)
    if mode == "exact" and total > EXACT_LIMIT:
        raise ResourceLimitError(
            f"exact mode supports |Orb_n| <= {EXACT_LIMIT}, found {total}", count=total
        )
    return enumerate_all_partial_orbits(F, n, cap=cap)


def _check_eps(eps) -> Fraction:
    if isinstance(eps, float):
        raise InvalidArgumentError("epsilon must be an exact rational")
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    return eps


def min_spanning_cardinality(F: Relation, n: int, epsilon, mode: str = "exact",
                             cap: int = DEFAULT_CAP,
                             node_limit: int = DEFAULT_NODE_LIMIT) -> CardinalityResult:
    """``r_n(eps)`` (exact) or a greedy upper bound, with a verified spanning set."""
    eps = _check_eps(epsilon)
    segs = _orbits_for(F, n, mode, cap)
    close = closeness_matrix(F.space, segs, eps)
    closed = _bitsets(close)
    nbr = [c & ~(1 << v) for v, c in enumerate(closed)]
    budget = _Budget(node_limit)
    picked = []
    for comp in _components(nbr):
        if comp & (comp - 1) == 0:
            picked.extend(_bits(comp))
        elif mode == "greedy":
            picked.extend(_greedy_dominating(closed, comp))
        else:
            picked.extend(_min_dominating(closed, comp, budget))
    cert = tuple(segs[i] for i in sorted(picked))
    if not is_spanning_set(F.space, segs, cert, eps):
        raise AssertionError("spanning certificate failed re-verification")
    return CardinalityResult(len(cert), cert, mode, n, eps)


def max_separated_cardinality(F: Relation, n: int, epsilon, mode: str = "exact",
                              cap: int = DEFAULT_CAP,
                              node_limit: int = DEFAULT_NODE_LIMIT) -> CardinalityResult:
    """``s_n(eps)`` (exact) or a greedy lower bound, with a verified separated set."""
    eps = _check_eps(epsilon)
    segs = _orbits_for(F, n, mode, cap)
    close = closeness_matrix(F.space, segs, eps)
    np.fill_diagonal(close, False)
    nbr = _bitsets(close)
    budget = _Budget(node_limit)
    picked = []
    for comp in _components(nbr):
        if comp & (comp - 1) == 0:
            picked.extend(_bits(comp))
        elif mode == "greedy":
            picked.extend(_greedy_independent(nbr, comp))
        else:
            picked.extend(_max_independent(nbr, comp, budget))
    cert = tuple(segs[i] for i in sorted(picked))
    if not is_separated_set(F.space, cert, eps):
        raise AssertionError("separated certificate failed re-verification")
    return CardinalityResult(len(cert), cert, mode, n, eps)


def verify_sandwich(F: Relation, n: int, epsilon, **kw):
    """Check ``r_n(eps) <= s_n(eps) <= r_n(eps/2)`` on exact values."""
    eps = _check_eps(epsilon)
    r = min_spanning_cardinality(F, n, eps, "exact", **kw).count
    s = max_separated_cardinality(F, n, eps, "exact", **kw).count
    r_half = min_spanning_cardinality(F, n, eps / 2, "exact", **kw).count
    return r <= s <= r_half, (r, s, r_half)


# -- tables -------------------------------------------------------------------

def _fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class EntropyRow:
    n: int
    epsilon: Fraction
    basis: str
    mode: str
    count: int

    @property
    def rate(self) -> float:
        return math.log(self.count) / self.n


@dataclass
class EntropyTable:
    rows: list = field(default_factory=list)

    HEADER = ("n", "epsilon", "basis", "mode", "count", "rate")

    def to_csv(self, decimal_epsilon: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(self.HEADER)
        if decimal_epsilon:
            header.append("epsilon_decimal")
        writer.writerow(header)
        for r in self.rows:
            line = [r.n, _fraction_str(r.epsilon), r.basis, r.mode, r.count, repr(r.rate)]
            if decimal_epsilon:
                line.append(repr(float(r.epsilon)))
            writer.writerow(line)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EntropyTable":
        body = "".join(line for line in io.StringIO(text) if not line.startswith("#"))
        reader = csv.DictReader(io.StringIO(body))
        rows = [
            EntropyRow(int(d["n"]), Fraction(d["epsilon"]), d["basis"], d["mode"], int(d["count"]))
            for d in reader
        ]
        return cls(rows)


def entropy_estimate_table(F: Relation, n_list, epsilon_list, basis: str = "separated",
                           mode: str = "exact", threads: int = 1, **kw) -> EntropyTable:
    """One row per ``(n, eps)``; finite-stage rates only, never extrapolated."""
    n_list = list(n_list)
    epsilon_list = [_check_eps(e) for e in epsilon_list]
    if not n_list or not epsilon_list:
        raise InvalidArgumentError("n_list and epsilon_list must be nonempty")
    if basis == "separated":
        solver = max_separated_cardinality
    elif basis == "spanning":
        solver = min_spanning_cardinality
    else:
        raise InvalidArgumentError(f"basis must be 'spanning' or 'separated', got {basis!r}")
    cells = [(n, e) for n in n_list for e in epsilon_list]

    def run(cell):
        n, e = cell
        return EntropyRow(n, e, basis, mode, solver(F, n, e, mode, **kw).count)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, cells))
    else:
        rows = [run(c) for c in cells]
    return EntropyTable(rows)
