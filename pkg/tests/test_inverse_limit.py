import itertools
from fractions import Fraction

import pytest

from setdyn import (
    ConstructionError,
    InvalidArgumentError,
    PreconditionError,
    Relation,
    build_discrete_space,
    build_grid_space,
    constant_relation,
    full_relation,
    identity_relation,
    invert,
    tent_inverse_relation,
)
from setdyn.inverse_limit import (
    TruncatedPoint,
    co_equals_invlim_inverse,
    enumerate_truncated,
    format_point,
    gamma,
    invlim_distance,
    is_invlim_point,
    lift_specification,
    parse_point,
    shift_sigma,
    spec_transfer_check,
    tail_depth,
)
from setdyn.orbits import random_orbit
from setdyn.properties import check_specification

from conftest import brute_orbits, suite_systems, surjective_suite

tent9 = tent_inverse_relation(build_grid_space(9))
full2 = full_relation(build_discrete_space(2))


def test_enumerate_examples():
    assert len(enumerate_truncated(identity_relation(build_discrete_space(4)), 3)) == 4
    assert len(enumerate_truncated(full2, 2)) == 8
    starts = [p for p in enumerate_truncated(tent9, 1) if p.coords[0] == 8]
    assert [p.coords for p in starts] == [(8, 4)]
    with pytest.raises(InvalidArgumentError):
        enumerate_truncated(full2, -1)


def test_enumerate_matches_brute_force(systems):
    for F in systems.values():
        for k in range(3):
            assert [p.coords for p in enumerate_truncated(F, k)] == brute_orbits(F, k + 1)


def test_shift_examples():
    assert shift_sigma(TruncatedPoint((2, 2, 2))).coords == (2, 2)
    assert shift_sigma(TruncatedPoint((8, 4, 2))).coords == (4, 2)
    with pytest.raises(InvalidArgumentError):
        shift_sigma(TruncatedPoint((1,)))


def test_gamma_then_shift_is_identity(systems):
    for F in systems.values():
        for k in range(5):
            for p in enumerate_truncated(F, k):
                for conv in ("invlim-consistent", "literal"):
                    ext = gamma(F, p, conv)
                    assert all(shift_sigma(q) == p and q.depth == k + 1 for q in ext)
                assert len(gamma(F, p, "literal")) == len(F(p.coords[0]))
                assert len(gamma(F, p)) == len(F.preimages()[p.coords[0]])


def test_gamma_conventions():
    I = identity_relation(build_discrete_space(3))
    assert gamma(I, TruncatedPoint((1, 1))) == [TruncatedPoint((1, 1, 1))]
    F3 = full_relation(build_discrete_space(3))
    assert len(gamma(F3, TruncatedPoint((0,)))) == 3
    # only the default convention stays inside the inverse limit
    p = TruncatedPoint((8, 4))
    assert all(is_invlim_point(tent9, q) for q in gamma(tent9, p))
    assert not all(is_invlim_point(tent9, q) for q in gamma(tent9, p, "literal"))
    with pytest.raises(InvalidArgumentError):
        gamma(tent9, p, "other")


def test_distance_examples():
    X = build_discrete_space(2)
    p = TruncatedPoint((0, 1, 1, 0))
    assert invlim_distance(X, p, p).value == 0
    q = TruncatedPoint((1, 1, 1, 0))
    assert invlim_distance(X, p, q).value == 1
    mv = invlim_distance(X, TruncatedPoint((0, 0, 0)), TruncatedPoint((1, 1, 1)))
    assert mv.value == Fraction(7, 4) and mv.tail_bound == Fraction(1, 4)
    with pytest.raises(InvalidArgumentError):
        invlim_distance(X, p, TruncatedPoint((0,)))


def test_distance_is_metric_exhaustively():
    for n in (2, 3, 4):
        X = build_grid_space(n)
        for k in (0, 1, 2):
            pts = [TruncatedPoint(c) for c in itertools.product(range(n), repeat=k + 1)]
            d = {(p, q): invlim_distance(X, p, q).value for p in pts for q in pts}
            for p, q in itertools.product(pts, repeat=2):
                assert d[p, q] == d[q, p]
                assert (d[p, q] == 0) == (p == q)
            for p, q, r in itertools.product(pts, repeat=3):
                assert d[p, r] <= d[p, q] + d[q, r]


def test_tail_depth():
    X = build_grid_space(9)
    assert tail_depth(X, Fraction(1, 4)) == 3
    assert X.diameter() / 2 ** tail_depth(X, Fraction(1, 5)) < Fraction(1, 5)


def test_point_serialization():
    p = TruncatedPoint((3, 0, 12))
    assert format_point(p) == "3,0,12"
    assert parse_point(format_point(p)) == p


def test_reversal_examples():
    assert co_equals_invlim_inverse(identity_relation(build_discrete_space(3)), 4)
    assert co_equals_invlim_inverse(full2, 4)
    assert co_equals_invlim_inverse(tent9, 3)
    with pytest.raises(PreconditionError):
        co_equals_invlim_inverse(constant_relation(build_discrete_space(3)), 2)


def test_reversal_all_depths_on_suite():
    for F in surjective_suite().values():
        for k in range(6):
            assert co_equals_invlim_inverse(F, k)


def test_spec_transfer_examples():
    assert spec_transfer_check(full2, Fraction(1, 4))
    two = Relation(build_discrete_space(2), ((1,), (0,)))
    assert spec_transfer_check(two, Fraction(1, 4), horizon=10)
    assert not check_specification(invert(two), Fraction(1, 4), horizon=10).has_witness
    assert spec_transfer_check(tent9, Fraction(1, 4))


def _base_M(F, eps):
    return check_specification(F, eps / 4).witness_M


def test_lift_single_window():
    eps = Fraction(1, 2)
    M = _base_M(full2, eps)
    res = lift_specification(full2, eps, [(TruncatedPoint((1, 0, 1, 1)), 0, 0)], M)
    assert res.verified and res.point.coords[: res.depth + 1] == (1, 0, 1, 1)[: res.depth + 1]


def test_lift_full_two_windows():
    eps = Fraction(1, 2)
    M = _base_M(full2, eps)
    k = tail_depth(full2.space, eps / 2)
    x1 = TruncatedPoint((0, 1, 1, 0, 1, 0))
    x2 = TruncatedPoint(tuple((i * 7) % 3 % 2 for i in range(30)))
    a2 = 1 + M + k + 1
    res = lift_specification(full2, eps, [(x1, 0, 1), (x2, a2, a2 + 1)], M)
    assert res.verified and is_invlim_point(full2, res.point)
    z = res.point.coords
    assert z[res.period] == z[0]
    assert all(upper < eps for *_, value, tail, ok in res.checks for upper in [value + tail])


def test_lift_tent_inverse_two_windows():
    eps = Fraction(1, 2)
    M = _base_M(tent9, eps)
    k = tail_depth(tent9.space, eps / 2)
    x1 = TruncatedPoint((8, 4, 2, 1, 0, 0, 8, 4))
    x2 = TruncatedPoint(random_orbit(tent9, 3, 25, seed=7).points)
    assert is_invlim_point(tent9, x1) and is_invlim_point(tent9, x2)
    a2 = 1 + M + k + 1
    res = lift_specification(tent9, eps, [(x1, 0, 1), (x2, a2, a2 + 1)], M)
    assert res.verified and is_invlim_point(tent9, res.point)
    assert len(res.checks) == 4


def test_lift_gap_precondition():
    eps = Fraction(1, 2)
    with pytest.raises(PreconditionError):
        lift_specification(full2, eps, [(TruncatedPoint((0,)), 0, 0), (TruncatedPoint((1,)), 1, 1)], 1)
