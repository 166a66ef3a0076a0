"""Mixing, specification and shadowing on finite relations.

Points of a finite space are open, so mixing is primitivity of the Boolean
adjacency matrix and is decided outright. Specification and shadowing
quantify over infinitely many configurations; here they are checked
exhaustively on a bounded battery and the bounds travel with the report.

The constructive helpers (:func:`build_separated_family_from_spec`,
:func:`stitch_pseudo_orbit`, :func:`weak_specification_via_shadowing`)
return objects that have already been re-verified against the definitions.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .entropy import is_separated_set
from .errors import ConstructionError, InvalidArgumentError, PreconditionError
from .metric_relation import Relation, is_surjective
from .orbits import (
    OrbitSegment,
    PeriodicOrbitRecord,
    PseudoOrbit,
    enumerate_all_partial_orbits,
    extend_backward,
    extend_forward,
    find_periodic_orbits,
    is_orbit,
    is_pseudo_orbit,
)

__all__ = [
    "MixingReport",
    "SpecBattery",
    "SpecReport",
    "ShadowReport",
    "SeparatedFamily",
    "WeakSpecResult",
    "wielandt_bound",
    "check_mixing",
    "check_specification",
    "verify_spec_implies_mixing",
    "layered_orbit",
    "periodic_gluing",
    "build_separated_family_from_spec",
    "find_shadowing_orbit",
    "check_shadowing",
    "select_periodic_cover",
    "stitching_gap",
    "stitch_pseudo_orbit",
    "weak_specification_via_shadowing",
]


def _frac(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _bool_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def _positive_eps(eps) -> Fraction:
    if isinstance(eps, float):
        raise InvalidArgumentError("tolerances must be exact rationals")
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidArgumentError("tolerances must be positive")
    return eps


# -- mixing -----------------------------------------------------------------

@dataclass(frozen=True)
class MixingReport:
    is_mixing: bool
    uniform_M: int | None
    witness_pair: tuple | None
    horizon: int

    def to_dict(self):
        out = {
            "property": "mixing",
            "verdict": "mixing" if self.is_mixing else "not-mixing",
            "parameters": {"horizon": self.horizon},
        }
        if self.is_mixing:
            out["witness"] = {"uniform_M": self.uniform_M}
        else:
            u, v = self.witness_pair
            out["counterexample"] = {"pair": [u, v], "power": self.horizon}
        return out


def wielandt_bound(n: int) -> int:
    return (n - 1) ** 2 + 1


def check_mixing(F: Relation) -> MixingReport:
    """Primitivity test by Boolean powering up to the Wielandt bound.

    ``uniform_M`` is the least ``m`` with ``A^m`` all-positive. Once that
    happens every later power stays positive because a surjective relation
    has no zero column; a non-surjective one never gets there.
    """
    a = F.adjacency()
    bound = wielandt_bound(F.size)
    power = a.copy()
    for m in range(1, bound + 1):
        if power.all():
            return MixingReport(True, m, None, bound)
        if m < bound:
            power = _bool_mul(power, a)
    u, v = (int(t) for t in np.argwhere(~power)[0])
    return MixingReport(False, None, (u, v), bound)


# -- layered reachability ------------------------------------------------------

def layered_orbit(F: Relation, allowed):
    """Find an orbit ``(z_0, ..., z_T)`` with ``z_t`` in ``allowed[t]``.

    ``allowed`` is a sequence of Boolean masks. Returns ``(points, None)`` on
    success or ``(None, t)`` where ``t`` is the first empty layer. Among all
    solutions the one ending at the smallest point is returned, with the
    smallest predecessor chosen at every step back.
    """
    a = F.adjacency()
    layers = [np.asarray(allowed[0], dtype=bool)]
    if not layers[0].any():
        return None, 0
    for t in range(1, len(allowed)):
        nxt = a[layers[-1]].any(axis=0) & allowed[t]
        if not nxt.any():
            return None, t
        layers.append(nxt)
    p = int(np.flatnonzero(layers[-1])[0])
    path = [p]
    for t in range(len(layers) - 2, -1, -1):
        p = int(np.flatnonzero(layers[t] & a[:, p])[0])
        path.append(p)
    path.reverse()
    return tuple(path), None


def periodic_gluing(F: Relation, allowed, period: int):
    """Closed walk ``z_0 -> ... -> z_P = z_0`` with ``z_t in allowed[t]`` for ``t < P``.

    ``allowed`` maps times ``0 <= t < period`` to masks; missing times are
    unconstrained. Returns the ``period`` points ``z_0..z_{P-1}`` or None.
    """
    n = F.size
    full = np.ones(n, dtype=bool)
    masks = [np.asarray(allowed.get(t, full), dtype=bool) for t in range(period)]
    a = F.adjacency()
    reach = np.diag(masks[0])
    for t in range(1, period):
        reach = _bool_mul(reach, a) & masks[t][None, :]
    closes = _bool_mul(reach, a).diagonal() & masks[0]
    if not closes.any():
        return None
    s = int(np.flatnonzero(closes)[0])
    start = np.zeros(n, dtype=bool)
    start[s] = True
    path, _ = layered_orbit(F, [start] + masks[1:] + [start])
    return path[:-1]


# -- specification --------------------------------------------------------------

@dataclass(frozen=True)
class SpecBattery:
    """Truncation of the specification quantifiers.

    ``max_length`` bounds window lengths, ``gap_window`` is how many gap
    and period values beyond ``M`` are tried (``None`` means ``|X|^2``) and
    ``max_segments`` is 1 or 2.
    """

    max_length: int = 3
    gap_window: int | None = None
    max_segments: int = 2

    def resolved(self, n_points: int) -> "SpecBattery":
        g = self.gap_window if self.gap_window is not None else n_points**2
        return SpecBattery(self.max_length, g, self.max_segments)


@dataclass(frozen=True)
class SpecReport:
    epsilon: Fraction
    horizon: int
    battery: SpecBattery
    witness_M: int | None
    failure_instance: dict | None

    @property
    def has_witness(self) -> bool:
        return self.witness_M is not None

    def to_dict(self):
        out = {
            "property": "specification",
            "verdict": "witness" if self.has_witness else "no-witness-up-to-horizon",
            "parameters": {
                "epsilon": _frac(self.epsilon),
                "horizon": self.horizon,
                "max_length": self.battery.max_length,
                "gap_window": self.battery.gap_window,
                "max_segments": self.battery.max_segments,
            },
        }
        if self.has_witness:
            out["witness"] = {"M": self.witness_M}
        else:
            out["counterexample"] = self.failure_instance
        return out


def _window_matrix(a: np.ndarray, balls: np.ndarray, points) -> np.ndarray:
    w = np.diag(balls[points[0]])
    for p in points[1:]:
        w = _bool_mul(w, a) & balls[p][None, :]
    return w


def check_specification(F: Relation, epsilon, horizon: int | None = None,
                        battery: SpecBattery | None = None) -> SpecReport:
    """Search ``M = 1..horizon`` for a specification witness on the battery.

    Windows are normalised so ``a_1 = 0``; since ``z`` closes up at time
    ``P`` and ``P`` exceeds the span of all windows, every instance is a
    closed walk of length ``P``. For segments ``x^1, x^2`` with window
    matrices ``W_i`` (masked path matrices inside the eps-balls) the
    instance with gap ``g`` and period ``P`` is solvable iff
    ``trace(W_1 A^g W_2 A^r) > 0`` where ``r = P - (b_2 - a_1)``.
    """
    ok, missing = is_surjective(F)
    if not ok:
        raise PreconditionError(f"specification needs a surjective relation; {missing} has no preimage")
    eps = _positive_eps(epsilon)
    n = F.size
    battery = (battery or SpecBattery()).resolved(n)
    if battery.max_segments not in (1, 2):
        raise InvalidArgumentError("max_segments must be 1 or 2")
    if horizon is None:
        horizon = wielandt_bound(n)
    G = battery.gap_window
    a = F.adjacency()
    balls = F.space.close_matrix(eps)

    # distinct window matrices, each keyed by its first segment in battery order
    reps = []
    seen = set()
    for length in range(1, battery.max_length + 1):
        for seg in enumerate_all_partial_orbits(F, length):
            w = _window_matrix(a, balls, seg.points)
            key = w.tobytes()
            if key not in seen:
                seen.add(key)
                reps.append((seg, w.astype(np.int64)))
    W = np.array([w for _, w in reps])

    powers = [np.eye(n, dtype=bool)]
    for _ in range(horizon + G):
        powers.append(_bool_mul(powers[-1], a))

    for M in range(1, horizon + 1):
        gvals = list(range(M + 1, M + G + 1))
        distinct, index = [], {}
        gmap = []
        for g in gvals:
            key = powers[g].tobytes()
            if key not in index:
                index[key] = len(distinct)
                distinct.append(powers[g].astype(np.int64))
            gmap.append(index[key])
        D = np.array(distinct)
        failure = None

        single = np.einsum("wij,qji->wq", W, D) > 0
        for wi in range(len(reps)):
            bad = [k for k, q in enumerate(gmap) if not single[wi, q]]
            if bad:
                seg = reps[wi][0]
                r = gvals[bad[0]]
                failure = {
                    "segments": [list(seg.points)],
                    "windows": [[0, len(seg) - 1]],
                    "gaps": [],
                    "P": len(seg) - 1 + r,
                }
                break

        if failure is None and battery.max_segments == 2:
            Y = np.einsum("wij,qjk->wqik", W, D)
            for w1 in range(len(reps)):
                L = np.einsum("ij,qjk->qik", W[w1], D)
                T = np.einsum("gij,wrji->wgr", L, Y) > 0
                if T.all():
                    continue
                # earliest failing (second segment, gap, period) in battery order
                for w2 in range(len(reps)):
                    hit = None
                    for gk, gq in enumerate(gmap):
                        for rk, rq in enumerate(gmap):
                            if not T[w2, gq, rq]:
                                hit = (gk, rk)
                                break
                        if hit:
                            break
                    if hit:
                        s1, s2 = reps[w1][0], reps[w2][0]
                        g, r = gvals[hit[0]], gvals[hit[1]]
                        b1 = len(s1) - 1
                        a2 = b1 + g
                        b2 = a2 + len(s2) - 1
                        failure = {
                            "segments": [list(s1.points), list(s2.points)],
                            "windows": [[0, b1], [a2, b2]],
                            "gaps": [g],
                            "P": b2 + r,
                        }
                        break
                break

        if failure is None:
            return SpecReport(eps, horizon, battery, M, None)
        last_failure = failure
    return SpecReport(eps, horizon, battery, None, last_failure)


def verify_spec_implies_mixing(F: Relation, epsilon, horizon: int | None = None,
                               battery: SpecBattery | None = None):
    """``check_mixing(F).is_mixing`` when a spec witness exists at a small eps.

    Returns None (skip) when the precondition fails: ``epsilon`` must be
    below half the minimum distance and the battery must find a witness.
    """
    eps = _positive_eps(epsilon)
    dmin = F.space.min_distance()
    if dmin is not None and not eps < dmin / 2:
        return None
    if not is_surjective(F)[0]:
        return None
    if not check_specification(F, eps, horizon, battery).has_witness:
        return None
    return check_mixing(F).is_mixing


# -- positive entropy from specification ---------------------------------------------------

@dataclass(frozen=True)
class SeparatedFamily:
    words: tuple
    segments: tuple
    length: int
    separated: bool
    rate_coefficient: Fraction

    @property
    def rate_bound(self) -> float:
        """``rate_coefficient * log 2``."""
        return float(self.rate_coefficient) * math.log(2)


def build_separated_family_from_spec(F: Relation, x: int, y: int, epsilon, M: int,
                                     n_blocks: int) -> SeparatedFamily:
    """One gluing orbit per word in ``{x, y}^n``, anchored at times ``(i-1)M``.

    ``M`` should witness specification at ``epsilon``. The family has
    ``2^n`` segments of length ``(n-1)M + 1`` and is checked to be
    eps-separated; the rate bound is ``(1/M) log 2``.
    """
    eps = _positive_eps(epsilon)
    space = F.space
    if not space.d(x, y) > 3 * eps:
        raise PreconditionError(f"need dist(x, y) > 3*eps, got {space.d(x, y)} vs {3 * eps}")
    if M < 1 or n_blocks < 1:
        raise InvalidArgumentError("M and n_blocks must be >= 1")
    length = (n_blocks - 1) * M + 1
    full = np.ones(F.size, dtype=bool)
    ball = {x: space.ball_mask(x, eps), y: space.ball_mask(y, eps)}
    words, family = [], []
    for word in itertools.product((x, y), repeat=n_blocks):
        allowed = [full] * length
        for i, target in enumerate(word):
            allowed[i * M] = ball[target]
        path, fail_t = layered_orbit(F, allowed)
        if path is None:
            raise ConstructionError(
                f"no gluing orbit for word {word}: stuck at time {fail_t} (anchor {fail_t // M + 1})",
                detail={"word": word, "anchor": fail_t // M + 1},
            )
        words.append(word)
        family.append(OrbitSegment(path))
    separated = len(set(family)) == len(family) and is_separated_set(space, family, eps)
    return SeparatedFamily(tuple(words), tuple(family), length, separated, Fraction(1, M))


# -- shadowing -----------------------------------------------------------------

@dataclass(frozen=True)
class ShadowReport:
    epsilon: Fraction
    delta: Fraction
    horizon: int
    verdict: str
    counterexample: PseudoOrbit | None
    exhaustive: bool
    checked: int

    def to_dict(self):
        out = {
            "property": "shadowing",
            "verdict": self.verdict,
            "parameters": {
                "epsilon": _frac(self.epsilon),
                "delta": _frac(self.delta),
                "horizon": self.horizon,
                "exhaustive": self.exhaustive,
                "checked": self.checked,
            },
        }
        if self.counterexample is not None:
            out["counterexample"] = {"pseudo_orbit": list(self.counterexample.points)}
        else:
            out["witness"] = None
        return out


def find_shadowing_orbit(F: Relation, w, epsilon) -> OrbitSegment | None:
    """An orbit ``z`` with ``dist(z_i, w_i) < eps`` for every ``i``, if one exists."""
    eps = _positive_eps(epsilon)
    points = w.points if isinstance(w, (PseudoOrbit, OrbitSegment)) else tuple(w)
    space = F.space
    path, _ = layered_orbit(F, [space.ball_mask(p, eps) for p in points])
    return OrbitSegment(path) if path is not None else None


def _delta_successors(F: Relation, delta: Fraction) -> list:
    space = F.space
    return [
        tuple(y for y in range(F.size) if space.distance_to_set(y, F(x)) < delta)
        for x in range(F.size)
    ]


def check_shadowing(F: Relation, epsilon, delta, horizon: int, budget: int = 100_000,
                    seed: int = 0) -> ShadowReport:
    """Test every delta-pseudo-orbit of length ``horizon`` for an eps-shadow.

    Exhaustive (depth-first, lexicographic) when there are at most
    ``budget`` of them, otherwise ``budget`` seeded random ones. Shadow
    layers are carried along the search, so the reported counterexample is
    the shortest failing prefix.
    """
    eps = _positive_eps(epsilon)
    delta = _positive_eps(delta)
    if horizon < 1:
        raise InvalidArgumentError("horizon must be >= 1")
    space = F.space
    a = F.adjacency()
    succ = _delta_successors(F, delta)
    balls = space.close_matrix(eps)

    ways = [1] * F.size
    for _ in range(horizon - 1):
        ways = [sum(ways[y] for y in succ[x]) for x in range(F.size)]
    total = sum(ways)

    def report(verdict, cex, exhaustive, checked):
        po = PseudoOrbit(tuple(cex), delta) if cex is not None else None
        return ShadowReport(eps, delta, horizon, verdict, po, exhaustive, checked)

    if total <= budget:
        checked = 0
        for x0 in range(F.size):
            seq = [x0]
            lay = [balls[x0]]
            stack = [iter(succ[x0])]
            if horizon == 1:
                checked += 1
                continue
            while stack:
                y = next(stack[-1], None)
                if y is None:
                    stack.pop()
                    seq.pop()
                    lay.pop()
                    continue
                layer = a[lay[-1]].any(axis=0) & balls[y]
                seq.append(y)
                if not layer.any():
                    return report("counterexample", seq, True, checked + 1)
                if len(seq) == horizon:
                    checked += 1
                    seq.pop()
                    continue
                lay.append(layer)
                stack.append(iter(succ[y]))
        return report("verified-up-to-horizon", None, True, checked)

    rng = random.Random(seed)
    for k in range(budget):
        seq = [rng.randrange(F.size)]
        for _ in range(horizon - 1):
            seq.append(rng.choice(succ[seq[-1]]))
        path, fail_t = layered_orbit(F, [balls[p] for p in seq])
        if path is None:
            return report("counterexample", seq[: fail_t + 1], False, k + 1)
    return report("verified-up-to-horizon", None, False, budget)


# -- stitching (shadowing plus dense periodic points) ---------------------------------

def select_periodic_cover(F: Relation, max_period: int, radius) -> list:
    """Greedy choice of periodic orbits whose centers form a ``radius``-net.

    Every point on a cycle is a candidate center (the cycle rotated to it).
    Each round picks the center covering the most still-uncovered points,
    breaking ties by shorter period, then smaller index. Raises
    :class:`PreconditionError` if some point is not within ``radius`` of any
    periodic point.
    """
    radius = _positive_eps(radius)
    space = F.space
    shortest = {}
    for rec in find_periodic_orbits(F, max_period):
        for p in rec.cycle:
            if p not in shortest or rec.period < shortest[p].period:
                shortest[p] = rec.rotated_to(p)
    reach = {c: set(space.ball(c, radius)) for c in shortest}
    uncovered = set(range(F.size))
    chosen = []
    while uncovered:
        best = max(
            shortest,
            key=lambda c: (len(reach[c] & uncovered), -shortest[c].period, -c),
            default=None,
        )
        if best is None or not reach[best] & uncovered:
            raise PreconditionError(
                f"points {sorted(uncovered)} are not within {radius} of a periodic point "
                f"of period <= {max_period}"
            )
        chosen.append(shortest[best])
        uncovered -= reach[best]
    return chosen


def stitching_gap(cover) -> tuple:
    """``(M0, M)`` with ``M0 = lcm(periods) * (m + 1)`` and ``M = 2 * M0``."""
    lcm = math.lcm(*(rec.period for rec in cover))
    m0 = lcm * (len(cover) + 1)
    return m0, 2 * m0


def _proximity_components(space, centers, delta):
    comps, seen = [], set()
    for c in centers:
        if c in seen:
            continue
        comp, todo = {c}, [c]
        while todo:
            u = todo.pop()
            for v in centers:
                if v not in comp and space.d(u, v) < delta:
                    comp.add(v)
                    todo.append(v)
        seen |= comp
        comps.append(sorted(comp))
    return comps


def _delta_chain(F, by_center, centers, delta, last, v):
    """Shortest chain of centers taking the point ``last`` to ``v`` by delta-jumps.

    A jump from a point ``p`` to ``q`` is allowed when ``q`` is within
    ``delta`` of ``F(p)``; between centers ``p`` is the last point of the
    previous center's cycle. Metric chains (consecutive centers ``< delta``
    apart) are always among these, since each cycle returns to its center.
    """
    space = F.space

    def jumps(p, q):
        return space.distance_to_set(q, F(p)) < delta

    prev = {c: None for c in centers if jumps(last, c)}
    queue = deque(prev)
    while queue:
        c = queue.popleft()
        end = by_center[c].cycle[-1]
        if jumps(end, v):
            chain = [c]
            while prev[chain[-1]] is not None:
                chain.append(prev[chain[-1]])
            return chain[::-1]
        for d in centers:
            if d not in prev and jumps(end, d):
                prev[d] = c
                queue.append(d)
    return None


def stitch_pseudo_orbit(F: Relation, segments, periodic_cover, delta) -> PseudoOrbit:
    """Glue orbit windows into one delta-pseudo-orbit through periodic orbits.

    ``segments`` is a list of ``(OrbitSegment, a, b)`` with
    ``len(segment) == b - a + 1`` and ``a_{i+1} - b_i > M`` where ``M`` comes
    from :func:`stitching_gap`. Window ``i`` is copied verbatim and followed
    for ``r_i`` more steps, where ``a_{i+1} - b_i - 1 = c_i' M0 + r_i``; the
    remaining ``c_i' M0`` slots are filled with a delta-chain of cover
    centers, each center's cycle repeated a whole number of times. Times
    before ``a_1`` are filled by pulling the first window back through
    preimages.
    """
    delta = _positive_eps(delta)
    space = F.space
    cover = list(periodic_cover)
    if not cover:
        raise PreconditionError("periodic cover is empty")
    for rec in cover:
        if not rec.is_valid(F):
            raise PreconditionError(f"{rec.cycle} is not a cycle of the relation")
    centers = []
    for rec in cover:
        if rec.center not in centers:
            centers.append(rec.center)
    by_center = {}
    for rec in cover:
        by_center.setdefault(rec.center, rec)
    half = delta / 2
    loose = [p for p in range(F.size) if space.distance_to_set(p, centers) >= half]
    if loose:
        raise PreconditionError(f"cover centers are not delta/2-dense; uncovered points {loose}")

    segs = [(tuple(s.points if isinstance(s, OrbitSegment) else s), a, b) for s, a, b in segments]
    if not segs:
        raise InvalidArgumentError("need at least one segment")
    for pts, a, b in segs:
        if a > b or len(pts) != b - a + 1:
            raise InvalidArgumentError(f"segment {pts} does not fit window [{a}, {b}]")
        if not is_orbit(F, pts):
            raise InvalidArgumentError(f"{pts} is not an orbit segment")
    m0, M = stitching_gap(cover)
    for (_, _, b), (_, a_next, _) in zip(segs, segs[1:]):
        if a_next - b <= M:
            raise PreconditionError(f"gap {a_next - b} must exceed M = {M}")

    lcm = m0 // (len(cover) + 1)
    first, a1, _ = segs[0]
    w = list(extend_backward(F, first[:1], a1)[:-1]) if a1 else []
    for i, (pts, a, b) in enumerate(segs):
        if i == len(segs) - 1:
            w.extend(pts)
            break
        nxt_pts, a_next, _ = segs[i + 1]
        c_prime, r = divmod(a_next - b - 1, m0)
        w.extend(extend_forward(F, pts, r))
        chain = _delta_chain(F, by_center, centers, delta, w[-1], nxt_pts[0])
        if chain is None:
            raise PreconditionError(
                "no delta-chain between windows; proximity components "
                f"{_proximity_components(space, centers, delta)}"
            )
        slots = c_prime * m0
        reps = [lcm // by_center[c].period for c in chain]
        reps[0] = (slots - (len(chain) - 1) * lcm) // by_center[chain[0]].period
        for c, k in zip(chain, reps):
            w.extend(by_center[c].unroll(k * by_center[c].period))
        if len(w) != a_next:
            raise AssertionError("stitching arithmetic is off")

    po = PseudoOrbit(tuple(w), delta)
    ok, bad = is_pseudo_orbit(F, po.points, delta) if len(w) > 1 else (True, None)
    if not ok:
        raise ConstructionError(f"stitched sequence breaks the delta bound at step {bad}", detail=po)
    for pts, a, b in segs:
        if tuple(w[a : b + 1]) != pts:
            raise ConstructionError("stitched sequence does not reproduce its windows", detail=po)
    return po


@dataclass(frozen=True)
class WeakSpecResult:
    orbit: OrbitSegment
    deviations: tuple
    pseudo_orbit: PseudoOrbit
    cover: tuple = field(repr=False)


def weak_specification_via_shadowing(F: Relation, epsilon, segments, delta, cover=None,
                                     max_period: int = 8) -> WeakSpecResult:
    """Stitch the windows into a delta-pseudo-orbit and eps-shadow it.

    The caller is responsible for ``delta`` witnessing shadowing at
    ``epsilon`` (see :func:`check_shadowing`). ``deviations[i]`` is the
    largest ``dist(z_j, x^i_j)`` over window ``i``.
    """
    eps = _positive_eps(epsilon)
    delta = _positive_eps(delta)
    if cover is None:
        cover = select_periodic_cover(F, max_period, delta / 2)
    w = stitch_pseudo_orbit(F, segments, cover, delta)
    z = find_shadowing_orbit(F, w, eps)
    if z is None:
        raise ConstructionError("stitched pseudo-orbit has no eps-shadow", detail=w)
    space = F.space
    devs = []
    for seg, a, b in segments:
        pts = seg.points if isinstance(seg, OrbitSegment) else tuple(seg)
        devs.append(max(space.d(z[a + j], pts[j]) for j in range(len(pts))))
    if not all(d < eps for d in devs):
        raise ConstructionError("shadowing orbit leaves an eps-window", detail=w)
    return WeakSpecResult(z, tuple(devs), w, tuple(cover))
