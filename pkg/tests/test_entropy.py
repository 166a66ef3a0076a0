import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setdyn import (
    InvalidArgumentError,
    ResourceLimitError,
    build_discrete_space,
    build_grid_space,
    full_relation,
    identity_relation,
    random_relation,
    tent_inverse_relation,
)
from setdyn.entropy import (
    EntropyTable,
    entropy_estimate_table,
    is_separated_set,
    is_spanning_set,
    max_separated_cardinality,
    min_spanning_cardinality,
    verify_sandwich,
)
from setdyn.orbits import count_partial_orbits, enumerate_all_partial_orbits

from conftest import brute_separated, brute_spanning

full2 = full_relation(build_discrete_space(2))


def test_examples_full_two_points():
    assert min_spanning_cardinality(full2, 2, Fraction(1, 2)).count == 4
    assert min_spanning_cardinality(full2, 2, 2).count == 1
    assert max_separated_cardinality(full2, 3, Fraction(1, 2)).count == 8
    assert max_separated_cardinality(full2, 3, 2).count == 1
    assert verify_sandwich(full2, 2, Fraction(1, 2)) == (True, (4, 4, 4))


def test_examples_identity():
    I3 = identity_relation(build_discrete_space(3))
    assert verify_sandwich(I3, 2, Fraction(1, 2)) == (True, (3, 3, 3))
    fixed = full_relation(build_grid_space(2)).__class__(build_grid_space(2), ((0,), (0,)))
    for n in (1, 3):
        assert min_spanning_cardinality(fixed, n, Fraction(1, 8)).count == 2


def test_tent_inverse_frozen_values():
    # r and s frozen from exhaustive subset search on the 9-point grid
    T = tent_inverse_relation(build_grid_space(9))
    table = [(1, Fraction(1, 4), 3, 5), (2, Fraction(1, 4), 6, 9),
             (1, Fraction(1, 8), 9, 9), (2, Fraction(1, 2), 3, 5)]
    for n, eps, r, s in table:
        assert min_spanning_cardinality(T, n, eps).count == r
        assert max_separated_cardinality(T, n, eps).count == s


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6), st.integers(1, 3),
       st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(1)]))
def test_exact_solvers_match_brute_force(k, seed, n, eps):
    F = random_relation(build_grid_space(k), Fraction(1, 3), seed=seed, surjective=False)
    if count_partial_orbits(F, n) > 10:
        return
    assert min_spanning_cardinality(F, n, eps).count == brute_spanning(F, n, eps)
    assert max_separated_cardinality(F, n, eps).count == brute_separated(F, n, eps)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6), st.integers(1, 4))
def test_greedy_brackets_exact_and_certificates_verify(k, seed, n):
    X = build_grid_space(k)
    F = random_relation(X, Fraction(1, 2), seed=seed, surjective=False)
    eps = Fraction(1, 3)
    segs = enumerate_all_partial_orbits(F, n)
    r, rg = (min_spanning_cardinality(F, n, eps, mode=m) for m in ("exact", "greedy"))
    s, sg = (max_separated_cardinality(F, n, eps, mode=m) for m in ("exact", "greedy"))
    assert rg.count >= r.count and sg.count <= s.count
    for res in (r, rg):
        assert is_spanning_set(X, segs, res.certificate, eps)
    for res in (s, sg):
        assert is_separated_set(X, res.certificate, eps)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6), st.integers(1, 3))
def test_monotone_in_epsilon(k, seed, n):
    F = random_relation(build_grid_space(k), Fraction(1, 2), seed=seed, surjective=False)
    e1, e2 = Fraction(1, 4), Fraction(2, 3)
    # the inclusion-derived direction: smaller eps separates at least as many
    assert max_separated_cardinality(F, n, e1).count >= max_separated_cardinality(F, n, e2).count
    assert min_spanning_cardinality(F, n, e1).count >= min_spanning_cardinality(F, n, e2).count


def test_exact_limit_and_float_rejection():
    F = full_relation(build_discrete_space(3))
    with pytest.raises(ResourceLimitError):
        max_separated_cardinality(F, 8, Fraction(1, 2))
    assert max_separated_cardinality(F, 8, Fraction(1, 2), mode="greedy").count == 3**8
    with pytest.raises(InvalidArgumentError):
        min_spanning_cardinality(F, 2, 0.5)
    with pytest.raises(InvalidArgumentError):
        min_spanning_cardinality(F, 2, 0)


def test_table_rates_and_csv_roundtrip():
    table = entropy_estimate_table(full2, range(1, 7), [Fraction(1, 2)])
    assert [r.count for r in table.rows] == [2**n for n in range(1, 7)]
    assert all(math.isclose(r.rate, math.log(2)) for r in table.rows)
    text = table.to_csv()
    assert text.splitlines()[0] == "n,epsilon,basis,mode,count,rate"
    assert "1/2" in text.splitlines()[1]
    assert EntropyTable.from_csv("# note\n" + text).rows == table.rows
    fixed = identity_relation(build_discrete_space(1))
    assert all(r.rate == 0 for r in entropy_estimate_table(fixed, [1, 2], [Fraction(1, 2)]).rows)


def test_table_threads_deterministic():
    T = tent_inverse_relation(build_grid_space(9))
    args = (T, [1, 2, 3], [Fraction(1, 4), Fraction(1, 2)])
    assert entropy_estimate_table(*args, threads=4).rows == entropy_estimate_table(*args).rows
