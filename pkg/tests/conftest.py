import itertools
import sys
from fractions import Fraction

import pytest

from setdyn import (
    Relation,
    build_discrete_space,
    build_grid_space,
    constant_relation,
    discretize_single_valued,
    full_relation,
    identity_relation,
    is_surjective,
    random_relation,
    tent_inverse_relation,
    tent_map,
)


def suite_systems():
    """Small named systems shared across the test modules."""
    d2 = build_discrete_space(2)
    d3 = build_discrete_space(3)
    g9 = build_grid_space(9)
    systems = {
        "identity3": identity_relation(d3),
        "full2": full_relation(d2),
        "full3": full_relation(build_grid_space(3)),
        "two_cycle": Relation(d2, ((1,), (0,))),
        "three_cycle": Relation(d3, ((1,), (2,), (0,))),
        "constant3": constant_relation(d3, 0),
        "tent_inverse9": tent_inverse_relation(g9),
        "tent9": discretize_single_valued(g9, tent_map),
    }
    for seed in range(4):
        systems[f"random{seed}"] = random_relation(build_grid_space(3 + seed), Fraction(1, 2), seed=seed)
    return systems


def surjective_suite():
    return {k: F for k, F in suite_systems().items() if is_surjective(F)[0]}


def seeded_corpus(count=40, sizes=range(2, 7), seed0=0):
    out = []
    sizes = list(sizes)
    for i in range(count):
        n = sizes[i % len(sizes)]
        density = Fraction(1, 4) if i % 2 else Fraction(1, 2)
        out.append(random_relation(build_grid_space(n), density, seed=seed0 + i))
    return out


# brute-force oracles, deliberately naive and independent of the package solvers

def brute_orbits(F, n):
    return [
        s for s in itertools.product(range(F.size), repeat=n)
        if all(s[i + 1] in F(s[i]) for i in range(n - 1))
    ]


def brute_close(space, a, b, eps):
    return all(space.d(x, y) < eps for x, y in zip(a, b))


def brute_spanning(F, n, eps):
    segs = brute_orbits(F, n)
    for k in range(1, len(segs) + 1):
        for S in itertools.combinations(segs, k):
            if all(any(brute_close(F.space, u, c, eps) for c in S) for u in segs):
                return k
    raise AssertionError("unreachable")


def brute_separated(F, n, eps):
    segs = brute_orbits(F, n)
    best = 1
    for k in range(2, len(segs) + 1):
        if any(
            all(not brute_close(F.space, a, b, eps) for a, b in itertools.combinations(S, 2))
            for S in itertools.combinations(segs, k)
        ):
            best = k
        else:
            break
    return best


def brute_mixing(F):
    """First N with every later power positive, checked out to three Wielandt bounds."""
    n = F.size
    A = [[int(j in F(i)) for j in range(n)] for i in range(n)]
    B = [[int(i == j) for j in range(n)] for i in range(n)]
    first = None
    for k in range(1, 3 * ((n - 1) ** 2 + 1) + 1):
        B = [[int(any(B[i][m] and A[m][j] for m in range(n))) for j in range(n)] for i in range(n)]
        if all(all(row) for row in B):
            first = first or k
        else:
            first = None
    return first


@pytest.fixture
def systems():
    return suite_systems()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
