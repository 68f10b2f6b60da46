import random
from collections import Counter
from dataclasses import replace
from math import factorial

import numpy as np
import pytest
from sympy.combinatorics import Permutation
from sympy.combinatorics.perm_groups import PermutationGroup as SymPyGroup

from sparsegalois.errors import BlockStructureViolated, DivisibilityViolated
from sparsegalois.monodromy.checks import (
    necklace_blocks, poisson_divisibility_check, poisson_modulus, verify_wreath_structure,
)
from sparsegalois.monodromy.loops import (
    degenerate_loop, expected_facet_signature, facet_resultant_loop, run_loop,
)
from sparsegalois.monodromy.perm import (
    PermutationGroup, compose, cycles, group_order, identity, inverse, is_even, order, power,
)
from sparsegalois.monodromy.run import (
    RunConfig, loop_power, run_monodromy, trinomial_solution_lattice,
)
from sparsegalois.numerics import random_system, solve_system
from sparsegalois.tuples import SupportTuple

Q = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
DIAMOND = [(0, 0), (1, 1), (1, -1), (2, 0), (1, 0)]


def T(*sets):
    return SupportTuple.of(list(sets))


# ---------------------------------------------------------------- permutations


def closure(gens, n):
    """Brute-force group enumeration."""
    seen = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = compose(s, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def test_trivial_group():
    assert group_order(PermutationGroup(5)) == 1


@pytest.mark.parametrize("d", [2, 3, 5, 8, 12])
def test_symmetric_group(d):
    swap = (1, 0) + tuple(range(2, d))
    cyc = tuple(list(range(1, d)) + [0])
    assert group_order(PermutationGroup(d, [swap, cyc])) == factorial(d)


def test_small_wreath():
    gens = [(1, 0, 2, 3), (2, 3, 0, 1)]
    assert group_order(PermutationGroup(4, gens)) == len(closure(gens, 4)) == 8


def test_against_enumeration_and_sympy():
    rng = random.Random(0)
    for _ in range(60):
        n = rng.randint(2, 7)
        gens = [tuple(rng.sample(range(n), n)) for _ in range(rng.randint(1, 3))]
        g = PermutationGroup(n, gens)
        assert g.order() == len(closure(gens, n)) == SymPyGroup([Permutation(list(p)) for p in gens]).order()
        assert all(g.contains(p) for p in gens)


def test_membership_and_growth():
    g = PermutationGroup(4)
    assert g.add((1, 0, 2, 3))
    assert not g.add((1, 0, 2, 3))
    assert g.contains(identity(4)) and not g.contains((0, 1, 3, 2))
    assert g.add((0, 1, 3, 2)) and g.order() == 4


def test_permutation_helpers():
    p = (1, 2, 0, 4, 3)
    assert order(p) == 6 and compose(p, inverse(p)) == identity(5)
    assert power(p, 6) == identity(5)
    assert sorted(len(c) for c in cycles(p)) == [2, 3]
    assert not is_even(p) and is_even(compose(p, p))


# ---------------------------------------------------------------- loops


def _base(t, seed):
    rng = np.random.default_rng(seed)
    base = random_system(t, rng)
    return base, np.array([r.z for r in solve_system(base)]), rng


def test_degenerate_loop_is_trivial():
    base, z, _ = _base(T(Q, Q), 0)
    res = run_loop(degenerate_loop(base), z)
    assert res.permutation == identity(8)
    assert np.array_equal(res.identity_winding(), np.zeros((8, 2), dtype=int))


def test_loop_power_sums_along_cycles():
    perm = (1, 0, 2)
    disp = np.array([[0.25, 0.0], [0.75, 1.0], [1.0, 0.0]])
    k, w = loop_power(perm, disp)
    assert k == 2 and w.tolist() == [[1, 1], [1, 1], [2, 0]]


@pytest.mark.parametrize("gamma, a", [((1, 1), (0, 0)), ((1, -1), (0, 0)), ((-1, -1), (2, 0))])
def test_diamond_facet_loop(gamma, a):
    base, z, rng = _base(T(DIAMOND, DIAMOND), 3)
    res = run_loop(facet_resultant_loop(base, gamma, 1, a, rng), z)
    assert res.loop.params["h"] == 2
    assert expected_facet_signature(res, gamma, 2)


def test_single_turn_gives_h_cycles():
    base, z, rng = _base(T(DIAMOND, DIAMOND), 4)
    res = run_loop(facet_resultant_loop(base, (1, 1), 0, (0, 0), rng, turns=1), z)
    assert sorted(len(c) for c in cycles(res.permutation) if len(c) > 1) == [2]


def test_qq_facet_loop():
    base, z, rng = _base(T(Q, Q), 5)
    res = run_loop(facet_resultant_loop(base, (0, -1), 0, (1, 1), rng), z)
    assert expected_facet_signature(res, (0, -1), 2)


# ---------------------------------------------------------------- runs


@pytest.fixture(scope="module")
def runs():
    return {
        "048": run_monodromy(T([(0,), (4,), (8,)]), seed=1),
        "023": run_monodromy(T([(0,), (2,), (3,)]), seed=1),
        "QQ": run_monodromy(T(Q, Q), seed=1),
    }


def test_univariate_orders(runs):
    assert runs["048"].order() == 32
    assert runs["023"].order() == 6
    assert runs["023"].lattice_status == "full"


def test_qq_order(runs):
    run = runs["QQ"]
    assert run.order() == 192
    assert run.lattice_status == "deficient"
    assert all(is_even(g) for g in run.group.generators)


def test_order_history_monotone(runs):
    for run in runs.values():
        h = run.order_history
        assert all(a <= b for a, b in zip(h, h[1:]))
        assert run.expected.order % run.order() == 0
        assert not run.budget_exhausted


def test_wreath_reports(runs):
    w = verify_wreath_structure(runs["048"])
    assert w.block_sizes == [4, 4] and w.contained and w.index == 1
    w = verify_wreath_structure(runs["QQ"])
    assert w.block_sizes == [2] * 4 and w.contained and w.index == 2
    w = verify_wreath_structure(runs["023"])
    assert w.block_sizes == [1, 1, 1] and w.index == 1


def test_block_action_is_well_defined(runs):
    for run in runs.values():
        blocks = necklace_blocks(run.z_base, run.reduction)
        where = {i: k for k, b in enumerate(blocks) for i in b}
        for g in run.group.generators:
            for b in blocks:
                assert len({where[g[i]] for i in b}) == 1


def test_splitting_generator_detected(runs):
    run = runs["QQ"]
    fake = replace(run, group=PermutationGroup(8, [(1, 2, 0) + tuple(range(3, 8))]))
    with pytest.raises(BlockStructureViolated):
        verify_wreath_structure(fake)


def test_poisson_checks(runs):
    assert poisson_divisibility_check(runs["QQ"], (0, 0)).modulus == 0
    rep = poisson_divisibility_check(runs["QQ"], (1, 0))
    assert rep.modulus == 2 and rep.checked > 0
    assert all(t % 2 == 0 for t in rep.totals)
    assert poisson_divisibility_check(runs["023"], (1,)).modulus == 1
    assert poisson_modulus(T([(0,), (2,), (3,)]), (1,)) == 1


def test_poisson_violation_detected(runs):
    run = runs["QQ"]
    bad = np.zeros((8, 2), dtype=int)
    bad[0] = (1, 0)
    fake = replace(run, lattice_generators=[bad])
    with pytest.raises(DivisibilityViolated):
        poisson_divisibility_check(fake, (1, 0))


def test_run_is_deterministic():
    t = T([(0,), (2,), (3,)])
    a = run_monodromy(t, seed=4)
    b = run_monodromy(t, seed=4)
    assert a.group.generators == b.group.generators
    assert [r.permutation for r in a.records] == [r.permutation for r in b.records]


def test_reduced_tuple_has_singleton_blocks():
    run = run_monodromy(T([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 0), (1, 0), (0, 1), (2, 1)]), seed=2)
    w = verify_wreath_structure(run)
    assert w.block_sizes == [1] * run.degree
    assert run.order() == factorial(run.degree)


def test_budget_flag():
    run = run_monodromy(T([(0,), (2,), (3,)]), config=RunConfig(budget=3, seed=0))
    assert run.budget_exhausted and run.loops_used == 3


def test_trinomial_lattice_spans():
    lat = trinomial_solution_lattice([(0,), (2,), (3,)], seed=0)
    assert lat.spans and lat.invariants == (1, 1, 1)
    assert Counter(sum(v) for v in lat.vectors) <= Counter({2: 100, 3: 100})
