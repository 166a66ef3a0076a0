from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setdyn import (
    InvalidArgumentError,
    ResourceLimitError,
    Relation,
    build_discrete_space,
    build_grid_space,
    constant_relation,
    full_relation,
    identity_relation,
    random_relation,
    relation_from_adjacency,
    tent_inverse_relation,
)
from setdyn.orbits import (
    OrbitSegment,
    count_partial_orbits,
    enumerate_all_partial_orbits,
    enumerate_partial_orbits,
    find_periodic_orbits,
    is_orbit,
    is_pseudo_orbit,
    random_orbit,
    segments_from_csv,
    segments_to_csv,
)

from conftest import brute_orbits


def test_enumeration_examples():
    X3 = build_grid_space(3)
    assert [s.points for s in enumerate_partial_orbits(identity_relation(X3), 1, 4)] == [(1, 1, 1, 1)]
    assert len(enumerate_partial_orbits(full_relation(X3), 2, 3)) == 9
    g9 = build_grid_space(9)
    T = tent_inverse_relation(g9)
    assert [s.points for s in enumerate_partial_orbits(T, 8, 2)] == [(8, 4)]
    assert len(enumerate_all_partial_orbits(identity_relation(X3), 3)) == 3
    assert len(enumerate_all_partial_orbits(full_relation(build_discrete_space(2)), 3)) == 8
    const = constant_relation(build_discrete_space(3), 0)
    assert [s.points for s in enumerate_all_partial_orbits(const, 2)] == [(0, 0), (1, 0), (2, 0)]


def test_tent_inverse_orbit_counts():
    # frozen from brute-force product enumeration
    T = tent_inverse_relation(build_grid_space(9))
    assert [count_partial_orbits(T, n) for n in range(1, 5)] == [9, 17, 32, 60]


def test_enumeration_matches_brute_force(systems):
    for F in systems.values():
        for n in (1, 2, 3):
            got = [s.points for s in enumerate_all_partial_orbits(F, n)]
            assert got == brute_orbits(F, n)
            assert count_partial_orbits(F, n) == len(got)


def test_cap_reports_count():
    F = full_relation(build_discrete_space(3))
    with pytest.raises(ResourceLimitError) as info:
        enumerate_all_partial_orbits(F, 4, cap=10)
    assert info.value.count == 10
    with pytest.raises(ResourceLimitError):
        enumerate_all_partial_orbits(F, 1, cap=2)
    with pytest.raises(InvalidArgumentError):
        enumerate_all_partial_orbits(F, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6), st.integers(1, 4))
def test_adding_an_edge_never_removes_segments(n, seed, length):
    X = build_grid_space(n)
    F = random_relation(X, Fraction(1, 3), seed=seed)
    a = F.adjacency().copy()
    i, j = seed % n, (seed // n) % n
    a[i, j] = True
    G = relation_from_adjacency(X, a)
    before = {s.points for s in enumerate_all_partial_orbits(F, length)}
    after = {s.points for s in enumerate_all_partial_orbits(G, length)}
    assert before <= after
    assert all(is_orbit(G, s) for s in after)


def test_periodic_examples():
    X3 = build_discrete_space(3)
    assert [r.cycle for r in find_periodic_orbits(identity_relation(X3), 3)] == [(0,), (1,), (2,)]
    two = Relation(build_discrete_space(2), ((1,), (0,)))
    recs = find_periodic_orbits(two, 4)
    assert [(r.cycle, r.period) for r in recs] == [((0, 1), 2)]
    T9 = tent_inverse_relation(build_grid_space(9))
    assert [r.cycle for r in find_periodic_orbits(T9, 1)] == [(0,)]


def test_periodic_unroll_is_shift_invariant(systems):
    for F in systems.values():
        for rec in find_periodic_orbits(F, 5):
            assert rec.is_valid(F)
            p = rec.period
            seq = rec.unroll(3 * p)
            assert is_orbit(F, seq)
            assert all(seq[i] == seq[i + p] for i in range(2 * p))
            assert len(set(rec.cycle)) == p


def test_periodic_counts_tent_inverse():
    # simple cycle counts by period, frozen from an independent DFS
    T9 = tent_inverse_relation(build_grid_space(9))
    recs = find_periodic_orbits(T9, 4)
    assert [sum(r.period == p for r in recs) for p in range(1, 5)] == [1, 2, 1, 2]


def test_pseudo_orbit_examples():
    g5 = build_grid_space(5)
    I = identity_relation(g5)
    assert is_pseudo_orbit(I, (0, 1), Fraction(1, 2)) == (True, None)
    assert is_pseudo_orbit(I, (0, 1), Fraction(1, 4)) == (False, 0)
    C = constant_relation(g5, 0)
    assert is_pseudo_orbit(C, (3, 2), Fraction(1, 2)) == (False, 0)
    T = tent_inverse_relation(build_grid_space(9))
    for seg in enumerate_all_partial_orbits(T, 4):
        assert is_pseudo_orbit(T, seg, Fraction(1, 1000))[0]


def test_pseudo_orbit_with_zero_delta_rejects_everything():
    T = tent_inverse_relation(build_grid_space(9))
    for seg in enumerate_all_partial_orbits(T, 3):
        assert not is_pseudo_orbit(T, seg, 0)[0]
        assert is_orbit(T, seg)


def test_random_orbit():
    X = build_discrete_space(2)
    assert random_orbit(identity_relation(X), 1, 5, seed=9).points == (1,) * 5
    F = full_relation(X)
    assert random_orbit(F, 0, 12, seed=5) == random_orbit(F, 0, 12, seed=5)
    T = tent_inverse_relation(build_grid_space(9))
    assert random_orbit(T, 8, 3, seed=1).points[1] == 4


def test_csv_roundtrip():
    segs = enumerate_all_partial_orbits(tent_inverse_relation(build_grid_space(9)), 3)
    text = segments_to_csv(segs)
    assert segments_from_csv("# header\n" + text) == segs
    assert text.splitlines()[0] == "0,0,0"


def test_segment_requires_points():
    with pytest.raises(InvalidArgumentError):
        OrbitSegment(())
