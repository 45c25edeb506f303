import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from plausinet import algebras as A
from plausinet import bayesnet as B
from plausinet.core import InvalidParameters
from plausinet.independence import OverlappingSets, disjoint_tuples, indep_rv

import oracles
from conftest import instances

F = Fraction

CHAIN = B.Dag(3, {(0, 1), (1, 2)})
FORK = B.Dag(3, {(1, 0), (1, 2)})
COLLIDER = B.Dag(3, {(0, 2), (1, 2)})


def xor_measure():
    return A.make_probability([F(1, 4), 0, 0, F(1, 4), 0, F(1, 4), F(1, 4), 0])


# -- graphs ------------------------------------------------------------------------


def test_dag_validation():
    with pytest.raises(InvalidParameters):
        B.Dag(3, {(0, 1), (1, 2), (2, 0)})
    with pytest.raises(InvalidParameters):
        B.Dag(2, {(0, 0)})
    with pytest.raises(InvalidParameters):
        B.Dag(2, {(0, 2)})


def test_dag_relations():
    g = B.Dag(4, {(0, 1), (1, 2), (0, 3)})
    assert g.parents(2) == (1,) and g.children(0) == (1, 3)
    assert g.descendants(1) == {1, 2}
    par, des, nondes = g.relatives(1)
    assert par == {0} and des == {1, 2} and nondes == {0, 3}
    order = g.topological_order()
    assert all(order.index(p) < order.index(c) for p, c in g.edges)


def test_complete_and_random_dags():
    g = B.complete_dag([2, 0, 1])
    assert g.edges == {(2, 0), (2, 1), (0, 1)}
    a = B.random_dag(5, random.Random(1))
    b = B.random_dag(5, random.Random(1))
    assert a == b


# -- d-separation --------------------------------------------------------------------


@pytest.mark.parametrize(
    "g,z,separated",
    [
        (CHAIN, set(), False),
        (CHAIN, {1}, True),
        (FORK, set(), False),
        (FORK, {1}, True),
        (COLLIDER, set(), True),
        (COLLIDER, {2}, False),
    ],
)
def test_three_node_patterns(g, z, separated):
    ends = (0, 2) if g is not COLLIDER else (0, 1)
    assert B.d_separated(g, {ends[0]}, {ends[1]}, z) == separated
    assert B.d_separated_paths(g, {ends[0]}, {ends[1]}, z) == separated


def test_conditioning_on_a_collider_descendant_opens_it():
    g = B.Dag(4, {(0, 2), (1, 2), (2, 3)})
    assert B.d_separated(g, {0}, {1})
    assert not B.d_separated(g, {0}, {1}, {3})


def test_dsep_argument_checks():
    with pytest.raises(OverlappingSets):
        B.d_separated(CHAIN, {0}, {0, 2})
    with pytest.raises(InvalidParameters):
        B.d_separated(CHAIN, {0}, {7})


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6), st.floats(0.1, 0.9))
def test_dsep_agrees_with_networkx(n, seed, p):
    g = B.random_dag(n, random.Random(seed), p)
    for xs, ys, zs in disjoint_tuples(n, 3):
        if xs and ys:
            assert B.d_separated(g, xs, ys, zs) == oracles.dsep_networkx(n, g.edges, xs, ys, zs)


# -- construction ----------------------------------------------------------------------


def test_xor_networks():
    mu = xor_measure()
    assert B.build_network(mu, [0, 1, 2]) == COLLIDER
    assert B.build_network(mu, [2, 0, 1]) == B.Dag(3, {(0, 1), (2, 1)})
    assert not B.is_compatible(B.Dag(3), mu)
    assert B.is_compatible(B.complete_dag([1, 2, 0]), mu)


def test_independent_coins_give_an_edgeless_network():
    assert B.build_network(A.uniform(3), [2, 1, 0]) == B.Dag(3)


@pytest.mark.parametrize("seed", range(3))
def test_build_network_matches_oracle(seed):
    rng = random.Random(seed)
    g = B.random_dag(3, rng)
    mu = B.random_factored_measure("probability", g, rng)
    for order in itertools.permutations(range(3)):
        want = oracles.build_network_prob(mu.weights, 3, list(order))
        assert B.build_network(mu, order).edges == want


def test_build_network_rejects_bad_orders():
    with pytest.raises(InvalidParameters):
        B.build_network(A.uniform(2), [0, 0])


# -- tables and the chain rule -----------------------------------------------------------


def test_xor_cpts_and_reconstruction():
    mu = xor_measure()
    qbn = B.extract_cpts(COLLIDER, mu)
    assert qbn.algebra == "probability"
    assert qbn.cpts[2].rows[(0, 1)] == (F(1), F(0))
    assert qbn.cpts[0].rows[()] == (F(1, 2), F(1, 2))
    assert B.reconstruct(qbn) == mu.world_values()


def test_double_coin_reconstruction():
    p = A.double_coin()
    g = B.build_network(p, [0, 1])
    assert g == B.Dag(2, {(0, 1)})
    assert B.reconstruct(B.extract_cpts(g, p)) == [A.StarFunction((F(0), F(1))), A.BOTTOM, A.BOTTOM, A.StarFunction((F(1), F(0)))]


def test_undefined_rows_and_missing_row():
    mu = A.make_probability([F(1, 2), 0, F(1, 2), 0])  # X1 is always 0
    g = B.Dag(2, {(0, 1)})
    qbn = B.extract_cpts(g, mu)
    assert qbn.cpts[1].rows[(1,)] is B.UNDEFINED
    assert B.reconstruct(qbn) == mu.world_values()
    # the undefined row matters once X1 = 1 is no longer impossible
    qbn.cpts[0].rows[()] = (F(1, 2), F(1, 2))
    with pytest.raises(B.MissingCptRow):
        B.reconstruct(qbn)


def test_extract_refuses_incompatible_graphs():
    with pytest.raises(B.IncompatibleNetwork):
        B.extract_cpts(B.Dag(3), xor_measure())
    with pytest.raises(B.IncompatibleNetwork):
        B.check_dsep_soundness(B.Dag(3), xor_measure())


def test_qbn_validation():
    cpt = B.Cpt(1, (), {(): (F(1, 2), F(1, 2))})
    with pytest.raises(InvalidParameters):
        B.QuantitativeBN(B.Dag(2, {(0, 1)}), {0: B.Cpt(0, (), {(): (F(1), F(0))}), 1: cpt}, A.PROBABILITY_DOMAIN)


@pytest.mark.parametrize("kind", A.ALGEBRAIC_FAMILIES)
def test_factored_measures_are_compatible_and_round_trip(kind):
    rng = random.Random(f"factored-{kind}")
    for _ in range(3):
        g = B.random_dag(4, rng, 0.4)
        m = B.random_factored_measure(kind, g, rng)
        if kind == "possibility-min":
            # min-combined tables need not respect g; rebuild instead
            g = B.build_network(m, g.topological_order())
        assert B.is_compatible(g, m)
        assert B.reconstruct(B.extract_cpts(g, m)) == m.world_values()
        assert B.check_dsep_soundness(g, m).passed


@pytest.mark.parametrize("kind", A.ALGEBRAIC_FAMILIES)
def test_verify_construction_on_random_instances(kind):
    for m in instances(kind, 3, 2):
        rep = B.verify_construction(m)
        assert rep.passed, [w.values for w in rep.witnesses]
        assert rep.checked == 6


# -- dependence witnesses -----------------------------------------------------------------


def test_collider_witness():
    mu = B.find_dependence_witness(COLLIDER, {0}, {1}, {2})
    assert mu is not None
    assert B.is_compatible(COLLIDER, mu)
    assert not oracles.ci_prob(mu.weights, 3, {0}, {1}, {2})
    assert not indep_rv(mu, {0}, {1}, {2})


def test_witness_search_refuses_separated_queries():
    with pytest.raises(B.DSeparatedQuery):
        B.find_dependence_witness(COLLIDER, {0}, {1})


def test_witness_search_is_seeded():
    a = B.find_dependence_witness(CHAIN, {0}, {2}, seed=5)
    b = B.find_dependence_witness(CHAIN, {0}, {2}, seed=5)
    assert a.weights == b.weights


def test_min_combined_possibility_can_miss_the_graph():
    rng = random.Random(1)
    seen = []
    for _ in range(10):
        g = B.random_dag(4, rng, 0.4)
        seen.append(B.is_compatible(g, B.random_factored_measure("possibility-min", g, rng)))
    assert not all(seen)


def test_factored_probability_tables():
    mu = B.factored_probability(CHAIN, {0: {(): F(1, 2)}, 1: {(0,): F(1, 4), (1,): F(3, 4)}, 2: {(0,): F(0), (1,): F(1)}})
    assert sum(mu.weights) == 1
    # X2 copies into X3, so worlds with X2 != X3 have no mass
    assert all(w == 0 for i, w in enumerate(mu.weights) if (i >> 1 & 1) != (i >> 2 & 1))
