import itertools
import random
from fractions import Fraction

import pytest

from algiso.domains import CoefficientDomain
from algiso.graphs import ColouredGraph, GraphError, brute_force_isomorphic
from algiso.generators import complete_graph, paper_example_pair, random_coloured_pair
from algiso.isosystems import (
    IsoSystem,
    MlinAssignment,
    PairVariableSpace,
    Violation,
    build_axb_system,
    build_iso_system,
    is_local_isomorphism,
    lift_system,
    multilinearise,
    multilinearise_lift,
    verify_assignment,
)
from algiso.linalg import SetVariable, solve_linear_system_field
from algiso.polynomials import Monomial, Polynomial, VariableSpace

Q = CoefficientDomain.rationals()


def test_local_isomorphism_basics():
    g, h = paper_example_pair()
    assert is_local_isomorphism([], g, h)
    assert not is_local_isomorphism([("1", "1"), ("1", "2")], g, h)  # not a map
    assert not is_local_isomorphism([("1", "1"), ("2", "1")], g, h)  # not injective
    # 1-3 is an edge in both graphs; 1-4 is not an edge in h
    assert is_local_isomorphism([("1", "1"), ("3", "3")], g, h)
    assert not is_local_isomorphism([("1", "1"), ("3", "4")], g, h)


def test_pair_space_pruning_counts():
    g, h = paper_example_pair()
    assert len(PairVariableSpace(g, h, prune=True)) == 12  # 3 colour pairs x 4
    assert len(PairVariableSpace(g, h, prune=False)) == 36


def test_build_iso_system_row_counts():
    g, h = paper_example_pair()
    iso = build_iso_system(g, h, Q)
    assert len(iso.row_sum) == len(h)
    assert len(iso.column_sum) == len(g)
    for p in iso.conflicts:
        assert p.degree == 2


def test_iso_system_rejects_two_singletons():
    g = ColouredGraph(["a"], {"a": ""}, [])
    with pytest.raises(GraphError):
        build_iso_system(g, g, Q)


def test_isomorphism_assignment_satisfies_system():
    rng = random.Random(13)
    for _ in range(8):
        g, h, mapping = random_coloured_pair(rng, rng.randint(2, 5), rng.randint(1, 2),
                                             isomorphic=True)
        iso = build_iso_system(g, h, Q)
        assign = {}
        for vid in iso.variables.live_ids():
            v, w = iso.variables.pair_of[vid]
            assign[vid] = Q.one() if mapping[v] == w else Q.zero()
        for p in iso.polynomials():
            assert p.evaluate(assign) == 0


def test_encoding_complete_on_small_pairs():
    # 0/1 solutions of the system exist exactly when the graphs are isomorphic
    rng = random.Random(14)
    checked_iso = checked_non = 0
    for _ in range(20):
        n = rng.randint(2, 4)
        g, h, _ = random_coloured_pair(rng, n, rng.randint(1, 2),
                                       isomorphic=rng.random() < 0.5)
        iso = build_iso_system(g, h, Q)
        live = iso.variables.live_ids()
        sat = False
        if len(live) <= 16:
            for bits in itertools.product((0, 1), repeat=len(live)):
                assign = {vid: Q.from_int(b) for vid, b in zip(live, bits)}
                if all(p.evaluate(assign) == 0 for p in iso.polynomials()):
                    sat = True
                    break
        else:
            continue
        want = brute_force_isomorphic(g, h).isomorphic
        assert sat == want
        checked_iso += want
        checked_non += not want
    assert checked_iso and checked_non


def test_lift_only_multiplier_one_at_base_degree():
    space = VariableSpace()
    x = space.add("x")
    p = Polynomial.variable(Q, x) - Polynomial.one(Q)
    lifted = lift_system([p], 1, [x])
    assert len(lifted) == 1
    assert lifted[0].multiplier == Monomial.one()


def test_lift_enumeration_two_variables():
    space = VariableSpace()
    x, y = space.add("x"), space.add("y")
    p = Polynomial.variable(Q, x) - Polynomial.one(Q)
    lifted = lift_system([p], 2, [x, y])
    products = {lp.product for lp in lifted}
    assert products == {
        p,
        Polynomial.boolean_axiom(Q, x),
        Polynomial.variable(Q, x) * Polynomial.variable(Q, y) - Polynomial.variable(Q, y),
    }


def test_lift_count_formula_example_pair():
    g, h = paper_example_pair()
    iso = build_iso_system(g, h, Q)
    polys = iso.polynomials()
    live = iso.variables.live_ids()
    lifted = lift_system(polys, 2, live)
    n_axioms = len(polys)
    n_deg2 = sum(1 for p in polys if p.degree == 2)
    assert len(lifted) == n_axioms * (1 + len(live)) - n_deg2 * len(live)


def test_multilinearise_collapses_squares():
    space = VariableSpace()
    x, y = space.add("x"), space.add("y")
    bool_ax = Polynomial.boolean_axiom(Q, x)
    system = multilinearise([bool_ax], Q)
    assert len(system) == 0  # both terms hit the same set-variable
    p = Polynomial.variable(Q, x) * Polynomial.variable(Q, y) + Polynomial.one(Q)
    system = multilinearise([p], Q)
    assert len(system) == 1
    row = system.rows[0]
    assert row.rhs == Fraction(-1)
    assert dict(row.coeffs) == {SetVariable((x, y)): Fraction(1)}


def test_multilinearise_lift_keeps_origins():
    g, h = paper_example_pair()
    iso = build_iso_system(g, h, Q)
    lifted = lift_system(iso.polynomials(), 2, iso.variables.live_ids())
    trace = multilinearise_lift(lifted, Q)
    assert len(trace.system.rows) == len(trace.origins)
    for row, origin in zip(trace.system.rows, trace.origins):
        # every column set stems from a monomial of the original product
        supports = {frozenset(m.variables()) for m in origin.product.monomials()}
        for c, _ in row.coeffs:
            assert frozenset(c.ids) in supports


def test_axb_rows_vanish_without_edges():
    g = ColouredGraph(["a", "b"], {"a": "", "b": ""}, [])
    iso = build_iso_system(g, g, Q)
    rows = build_axb_system(iso)
    balance = rows[: len(g) * len(g)]
    assert all(p.is_zero() for p in balance)


def test_axb_satisfied_by_permutation_matrices():
    g = complete_graph(2)
    iso = build_iso_system(g, g, Q)
    rows = build_axb_system(iso)
    for perm in (((0, 1), (1, 0)), ((1, 0), (0, 1))):
        assign = {}
        for vid in iso.variables.live_ids():
            v, w = iso.variables.pair_of[vid]
            i, j = g.vertices.index(v), g.vertices.index(w)
            assign[vid] = Q.from_int(perm[i][j])
        for p in rows:
            assert p.evaluate(assign) == 0


def test_verify_assignment_flags():
    space = VariableSpace()
    a, b = space.add("a"), space.add("b")
    sva, svab = SetVariable((a,)), SetVariable((a, b))
    # row X_a + X_ab = 1 holds for the assignment, the subset implication fails
    p = (Polynomial.variable(Q, a)
         + Polynomial.variable(Q, a) * Polynomial.variable(Q, b)
         - Polynomial.one(Q))
    system = multilinearise([p], Q)
    alpha = MlinAssignment(Q, {sva: Fraction(0), svab: Fraction(1)})
    assert verify_assignment(alpha, system) is True
    out = verify_assignment(alpha, system, downward_zero=True)
    assert isinstance(out, Violation) and out.kind == "pair"


def test_verify_assignment_missing_column():
    space = VariableSpace()
    a = space.add("a")
    p = Polynomial.variable(Q, a) - Polynomial.one(Q)
    system = multilinearise([p], Q)
    alpha = MlinAssignment(Q, {})
    out = verify_assignment(alpha, system)
    assert isinstance(out, Violation) and out.kind == "missing"


def test_multiplicative_assignment_passes_downward_zero():
    rng = random.Random(15)
    g, h, mapping = random_coloured_pair(rng, 4, 2, isomorphic=True)
    iso = build_iso_system(g, h, Q)
    lifted = lift_system(iso.polynomials(), 2, iso.variables.live_ids())
    trace = multilinearise_lift(lifted, Q)
    base = {}
    for vid in iso.variables.live_ids():
        v, w = iso.variables.pair_of[vid]
        base[vid] = Fraction(1) if mapping[v] == w else Fraction(0)
    values = {}
    for c in trace.system.columns():
        val = Fraction(1)
        for vid in c.ids:
            val *= base[vid]
        values[c] = val
    alpha = MlinAssignment(Q, values)
    assert verify_assignment(alpha, trace.system, downward_zero=True) is True


def test_pruning_is_conservative():
    rng = random.Random(16)
    domains = [Q, CoefficientDomain.prime_field(2), CoefficientDomain.prime_field(3)]
    for _ in range(10):
        g, h, _ = random_coloured_pair(rng, rng.randint(2, 4), 2,
                                       isomorphic=rng.random() < 0.5)
        for d in domains:
            results = []
            for prune in (True, False):
                iso = build_iso_system(g, h, d, prune=prune)
                lifted = lift_system(iso.polynomials(), 2, iso.variables.live_ids())
                trace = multilinearise_lift(lifted, d)
                res = solve_linear_system_field(trace.system, want_farkas=False)
                results.append(res.solvable)
            assert results[0] == results[1], (d.name, g.to_json(), h.to_json())
