"""Finite-depth inverse limits, the shift and its set-valued inverse.

Points of the inverse limit are forward sequences ``(x_0, x_1, ...)`` with
``x_{i+1} in F(x_i)``; a :class:`TruncatedPoint` keeps ``x_0..x_k``. The
metric is ``sum_j dist(x_j, y_j) / 2^j`` with ``j`` from 0, and every
truncated distance carries the exact bound ``diam / 2^k`` on the dropped
tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConstructionError, InvalidArgumentError, PreconditionError
from .metric_relation import MetricSpace, Relation, invert, is_surjective
from .orbits import DEFAULT_CAP, enumerate_all_partial_orbits, extend_forward, is_orbit
from .properties import SpecBattery, check_specification, periodic_gluing

__all__ = [
    "TruncatedPoint",
    "InvLimMetricValue",
    "LiftResult",
    "enumerate_truncated",
    "is_invlim_point",
    "shift_sigma",
    "gamma",
    "invlim_distance",
    "tail_depth",
    "lift_specification",
    "co_equals_invlim_inverse",
    "spec_transfer_check",
    "format_point",
    "parse_point",
]

GAMMA_CONVENTIONS = ("invlim-consistent", "literal")


@dataclass(frozen=True, order=True)
class TruncatedPoint:
    coords: tuple

    def __post_init__(self):
        if not self.coords:
            raise InvalidArgumentError("a truncated point has at least one coordinate")

    @property
    def depth(self) -> int:
        return len(self.coords) - 1

    def prefix(self, depth: int) -> "TruncatedPoint":
        if depth > self.depth:
            raise InvalidArgumentError(f"cannot take depth {depth} of a depth-{self.depth} point")
        return TruncatedPoint(self.coords[: depth + 1])

    def reversed(self) -> "TruncatedPoint":
        return TruncatedPoint(self.coords[::-1])


@dataclass(frozen=True)
class InvLimMetricValue:
    value: Fraction
    tail_bound: Fraction

    @property
    def upper(self) -> Fraction:
        """Bound on the distance between any two points with these prefixes."""
        return self.value + self.tail_bound


def format_point(p: TruncatedPoint) -> str:
    return ",".join(str(c) for c in p.coords)


def parse_point(text: str) -> TruncatedPoint:
    return TruncatedPoint(tuple(int(t) for t in text.split(",")))


def is_invlim_point(F: Relation, p: TruncatedPoint) -> bool:
    return is_orbit(F, p.coords)


def enumerate_truncated(F: Relation, depth: int, cap: int = DEFAULT_CAP) -> list:
    """Every depth-``k`` prefix of a point of the inverse limit."""
    if depth < 0:
        raise InvalidArgumentError("depth must be >= 0")
    return [TruncatedPoint(s.points) for s in enumerate_all_partial_orbits(F, depth + 1, cap)]


def shift_sigma(p: TruncatedPoint) -> TruncatedPoint:
    if p.depth < 1:
        raise InvalidArgumentError("cannot shift a depth-0 point")
    return TruncatedPoint(p.coords[1:])


def gamma(F: Relation, p: TruncatedPoint, convention: str = "invlim-consistent") -> list:
    """All front extensions ``(x_{-1}, x_0, ...)`` of ``p``.

    ``"invlim-consistent"`` takes ``x_{-1}`` with ``x_0 in F(x_{-1})``, so the
    extension stays in the inverse limit. ``"literal"`` takes
    ``x_{-1} in F(x_0)`` literally; those extensions need not be points of
    the inverse limit.
    """
    if convention == "invlim-consistent":
        fronts = F.preimages()[p.coords[0]]
    elif convention == "literal":
        fronts = F(p.coords[0])
    else:
        raise InvalidArgumentError(f"convention must be one of {GAMMA_CONVENTIONS}")
    return [TruncatedPoint((x,) + p.coords) for x in fronts]


def invlim_distance(space: MetricSpace, p: TruncatedPoint, q: TruncatedPoint) -> InvLimMetricValue:
    if p.depth != q.depth:
        raise InvalidArgumentError(f"depth mismatch: {p.depth} vs {q.depth}")
    value = sum(
        (space.d(x, y) / 2**j for j, (x, y) in enumerate(zip(p.coords, q.coords))),
        Fraction(0),
    )
    return InvLimMetricValue(value, space.diameter() / 2**p.depth)


def tail_depth(space: MetricSpace, bound) -> int:
    """Smallest ``k`` with ``diam / 2^k < bound``."""
    bound = Fraction(bound)
    k = 0
    while not space.diameter() / 2**k < bound:
        k += 1
    return k


@dataclass(frozen=True)
class LiftResult:
    point: TruncatedPoint
    period: int
    depth: int
    base_epsilon: Fraction
    checks: tuple

    @property
    def verified(self) -> bool:
        return all(ok for *_, ok in self.checks)


def lift_specification(F: Relation, epsilon, segments, base_witness_M: int,
                       depth: int | None = None, period: int | None = None) -> LiftResult:
    """A sigma-periodic point that eps-traces the given inverse-limit windows.

    ``segments`` is a list of ``(TruncatedPoint x, a, b)``; coordinates of
    ``x`` are absolute times and are continued forward by smallest
    successors whenever the window needs more than ``x`` provides. The
    windows are read backwards (the ``alpha_i, beta_i`` anchors) and glued
    by a closed walk of ``invert(F)``, whose time reversal is then a
    periodic point of the inverse limit of ``F``.

    The tail depth ``k`` makes ``diam/2^k < eps/2``. With weights ``2^-j``
    from ``j = 0`` the coordinate weights sum to less than 2, so base
    windows are matched within ``eps/4``. ``base_witness_M`` is a
    specification witness at that tolerance and gaps must exceed
    ``base_witness_M + k``.

    Every ``a_i <= a <= b_i`` is re-checked as
    ``value + tail_bound < eps`` on the depth-``k`` prefixes of
    ``sigma^a(z)`` and ``sigma^a(x^i)``.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    space = F.space
    k = tail_depth(space, eps / 2) if depth is None else depth
    if not space.diameter() / 2**k < eps / 2:
        raise PreconditionError(f"tail bound diam/2^{k} is not below eps/2")
    base_eps = eps / 4
    wins = sorted(((tuple(x.coords), a, b) for x, a, b in segments), key=lambda t: t[1])
    if not wins:
        raise InvalidArgumentError("need at least one window")
    full_windows = []
    for coords, a, b in wins:
        if a < 0 or a > b:
            raise InvalidArgumentError(f"bad window [{a}, {b}]")
        if not is_orbit(F, coords):
            raise InvalidArgumentError(f"{coords} is not a point of the inverse limit")
        need = b + k + 1 - len(coords)
        full_windows.append((extend_forward(F, coords, need) if need > 0 else coords, a, b))
    M = base_witness_M + k
    for (_, _, b), (_, a_next, _) in zip(full_windows, full_windows[1:]):
        if a_next - b <= M:
            raise PreconditionError(f"gap {a_next - b} must exceed M' + k = {M}")
    n = len(full_windows)
    a1 = full_windows[0][1]
    bn = full_windows[-1][2]
    D = M + bn - a1 + 1 if period is None else period
    if not D > M + bn - a1:
        raise PreconditionError(f"period {D} must exceed M + b_n - a_1 = {M + bn - a1}")

    inv = invert(F)
    allowed = {}
    for i in range(1, n + 1):
        coords, a, b = full_windows[n - i]
        alpha, beta = bn - b, bn + k - a
        for j in range(alpha, beta + 1):
            allowed[j % D] = space.ball_mask(coords[bn + k - j], base_eps)
    cycle = periodic_gluing(inv, allowed, D)
    if cycle is None:
        raise ConstructionError(
            "base gluing failed; the base witness does not cover this instance",
            detail={"period": D, "windows": [(a, b) for _, a, b in full_windows]},
        )
    zc = tuple(cycle[(bn + k - t) % D] for t in range(max(bn + k, D) + 1))
    z = TruncatedPoint(zc)
    if not is_orbit(F, zc) or zc[D] != zc[0]:
        raise ConstructionError("reversed gluing orbit is not a periodic point", detail=z)

    checks = []
    for idx, (coords, a, b) in enumerate(full_windows, start=1):
        for t in range(a, b + 1):
            mv = invlim_distance(
                space, TruncatedPoint(zc[t : t + k + 1]), TruncatedPoint(coords[t : t + k + 1])
            )
            checks.append((idx, t, mv.value, mv.tail_bound, mv.upper < eps))
    result = LiftResult(z, D, k, base_eps, tuple(checks))
    if not result.verified:
        bad = next(c for c in checks if not c[-1])
        raise ConstructionError(f"lifted point misses window {bad[0]} at shift {bad[1]}", detail=result)
    return result


def co_equals_invlim_inverse(F: Relation, depth: int, cap: int = DEFAULT_CAP) -> bool:
    """Reversed depth-``k`` prefixes of ``F`` are exactly those of ``invert(F)``."""
    ok, p = is_surjective(F)
    if not ok:
        raise PreconditionError(f"relation is not surjective; {p} has no preimage")
    forward = {p.reversed() for p in enumerate_truncated(F, depth, cap)}
    backward = set(enumerate_truncated(invert(F), depth, cap))
    return forward == backward


def spec_transfer_check(F: Relation, epsilon, horizon: int | None = None,
                        battery: SpecBattery | None = None) -> bool:
    """Do ``F`` and ``invert(F)`` get the same specification verdict?"""
    inv = invert(F)
    if not is_surjective(inv)[0]:
        raise PreconditionError("inverse relation is not surjective")
    here = check_specification(F, epsilon, horizon, battery).has_witness
    there = check_specification(inv, epsilon, horizon, battery).has_witness
    return here == there
