import itertools
import random

import pytest

from algiso.generators import complete_graph, cycle_graph, paper_example_pair, random_coloured_pair
from algiso.graphs import ColouredGraph, GraphError, brute_force_isomorphic, verify_isomorphism
from algiso.groupcsp import (
    Constraint,
    CSPError,
    FiniteGroup,
    GroupCSP,
    TseitinInstance,
    build_gadget_graphs,
    csp_solution_to_isomorphism,
    graphs_to_group_csp,
    group_csp_solution_to_graph_iso,
    isomorphism_to_csp_solution,
    solve_group_csp,
    solve_parity_csp,
    tseitin_csp,
)


def k4_instance(charges):
    return TseitinInstance.make(complete_graph(4), charges)


def test_group_axioms_z2_and_s3():
    z2 = FiniteGroup.z2_multiplicative()
    assert z2.identity == 1 and z2.inv(-1) == -1
    s3 = FiniteGroup.symmetric(3)
    assert len(s3) == 6
    for a in s3.elements:
        assert s3.op(a, s3.inv(a)) == s3.identity


def test_coset_validation_rejects_non_coset():
    z2 = FiniteGroup.z2_multiplicative()
    with pytest.raises(CSPError):
        GroupCSP(z2, [Constraint("C", ("x", "y"),
                                 ((1, 1), (1, -1), (-1, 1)))])  # 3 of 4 tuples


def test_tseitin_counting_k4():
    inst = k4_instance(["v0"])
    csp = tseitin_csp(inst)
    assert len(csp.variables) == 6
    assert len(csp.constraints) == 4
    for c in csp.constraints:
        assert len(c.variables) == 3
        assert len(c.coset) == 4
    twisted = [c for c in csp.constraints
               if all(_prod(t) == -1 for t in c.coset)]
    assert len(twisted) == 1


def _prod(t):
    out = 1
    for x in t:
        out *= x
    return out


def test_tseitin_empty_charge_all_ones():
    csp = tseitin_csp(k4_instance([]))
    phi = {x: 1 for x in csp.variables}
    assert csp.satisfied_by(phi)


def test_tseitin_rejects_isolated_vertex():
    g = ColouredGraph(["a", "b", "c"], {v: "" for v in "abc"}, [("a", "b")])
    with pytest.raises(GraphError):
        tseitin_csp(TseitinInstance.make(g, []))


def test_parity_solver_matches_parity_of_charges():
    for charges in ([], ["v0"], ["v0", "v1"], ["v0", "v1", "v2"]):
        csp = tseitin_csp(k4_instance(charges))
        phi = solve_parity_csp(csp)
        if len(charges) % 2 == 0:
            assert phi is not None and csp.satisfied_by(phi)
        else:
            assert phi is None


def test_parity_solver_two_charges_is_path_like():
    csp = tseitin_csp(k4_instance(["v0", "v1"]))
    phi = solve_parity_csp(csp)
    flipped = sorted(x for x, val in phi.items() if val == -1)
    # edges with value -1 form a join of the two charged vertices
    assert flipped  # nonempty
    assert csp.satisfied_by(phi)


def test_parity_solver_rejects_other_groups():
    s2 = FiniteGroup.symmetric(2)
    csp = GroupCSP(s2, [Constraint("C", ("x",), tuple(sorted((p,) for p in s2.elements)))])
    with pytest.raises(CSPError):
        solve_parity_csp(csp)


def test_gadget_counts_k4():
    inst = k4_instance(["v0"])
    pair = build_gadget_graphs(tseitin_csp(inst))
    assert len(pair.g) == 6 * 2 + 4 * 4 == 28
    assert len(pair.twin) == 28
    assert len(pair.g.edges) == 4 * 4 * 3 == 48
    assert len(pair.twin.edges) == 48
    # colour class sizes: 2 per variable class, 4 per constraint class
    hist = pair.g.colour_histogram()
    assert sorted(hist.values()) == [2] * 6 + [4] * 4
    assert pair.g.colour_histogram() == pair.twin.colour_histogram()


def test_single_unconstrained_variable_gadget():
    z2 = FiniteGroup.z2_multiplicative()
    csp = GroupCSP(z2, [Constraint("C", ("x",), ((1,), (-1,)))])
    pair = build_gadget_graphs(csp)
    res = brute_force_isomorphic(pair.g, pair.twin)
    assert res.isomorphic


def test_satisfiable_csp_gives_verified_isomorphism():
    inst = k4_instance(["v0", "v2"])
    csp = tseitin_csp(inst)
    phi = solve_parity_csp(csp)
    pair = build_gadget_graphs(csp)
    mapping = csp_solution_to_isomorphism(pair, phi)
    assert verify_isomorphism(pair.g, pair.twin, mapping)


def test_solution_isomorphism_round_trip():
    inst = k4_instance(["v1", "v3"])
    csp = tseitin_csp(inst)
    pair = build_gadget_graphs(csp)
    phi = solve_parity_csp(csp)
    mapping = csp_solution_to_isomorphism(pair, phi)
    back = isomorphism_to_csp_solution(pair, mapping)
    assert csp.satisfied_by(back)


def test_isomorphism_to_solution_rejects_non_isomorphism():
    inst = k4_instance([])
    csp = tseitin_csp(inst)
    pair = build_gadget_graphs(csp)
    # cross two images between different colour classes
    bogus = {v: w for v, w in zip(pair.g.vertices, pair.twin.vertices)}
    keys = [k for k in bogus if "C@" in k][:1] + [k for k in bogus if "|z(" in k][:1]
    assert len(keys) == 2
    bogus[keys[0]], bogus[keys[1]] = bogus[keys[1]], bogus[keys[0]]
    with pytest.raises(CSPError):
        isomorphism_to_csp_solution(pair, bogus)


def test_homogeneous_identity_round_trip():
    csp = tseitin_csp(k4_instance([]))
    hom = csp.homogenised()
    pair = build_gadget_graphs(hom)
    mapping = {}
    for key, name in pair.variable_vertex.items():
        mapping[name] = pair.twin_variable_vertex[key]
    for key, name in pair.constraint_vertex.items():
        mapping[name] = pair.twin_constraint_vertex[key]
    phi = isomorphism_to_csp_solution(pair, mapping)
    assert all(val == 1 for val in phi.values())


def test_csp_satisfiable_iff_gadgets_isomorphic_exhaustive():
    # all base graphs with <= 6 edges reachable here, both charge parities
    bases = [
        complete_graph(3),
        cycle_graph(4),
        cycle_graph(5),
        ColouredGraph(["a", "b", "c", "d"], {v: "" for v in "abcd"},
                      [("a", "b"), ("b", "c"), ("c", "d")]),  # path
        ColouredGraph(["a", "b", "c", "d"], {v: "" for v in "abcd"},
                      [("a", "b"), ("a", "c"), ("a", "d")]),  # star
    ]
    seen_sat = seen_unsat = 0
    for base in bases:
        assert len(base.edges) <= 6
        for parity in (0, 1):
            charges = list(base.vertices[:parity])
            inst = TseitinInstance.make(base, charges)
            csp = tseitin_csp(inst)
            phi = solve_parity_csp(csp)
            pair = build_gadget_graphs(csp)
            iso = brute_force_isomorphic(pair.g, pair.twin, cap=30)
            assert (phi is not None) == iso.isomorphic
            if phi is not None:
                seen_sat += 1
                mapping = csp_solution_to_isomorphism(pair, phi)
                back = isomorphism_to_csp_solution(pair, mapping)
                assert csp.satisfied_by(back)
            else:
                seen_unsat += 1
                assert iso.mapping is None
    assert seen_sat and seen_unsat


def test_backtracking_solver_agrees_with_parity():
    rng = random.Random(3)
    for _ in range(6):
        base = cycle_graph(rng.randint(3, 5))
        charges = [v for v in base.vertices if rng.random() < 0.5]
        csp = tseitin_csp(TseitinInstance.make(base, charges))
        a = solve_parity_csp(csp)
        b = solve_group_csp(csp)
        assert (a is None) == (b is None)


# -- coloured pairs as symmetric-group CSPs -----------------------------------


def test_graphs_to_csp_singleton_classes():
    g = ColouredGraph(["a", "b"], {"a": "r", "b": "s"}, [("a", "b")])
    h = ColouredGraph(["c", "d"], {"c": "r", "d": "s"}, [("c", "d")])
    csp = graphs_to_group_csp(g, h)
    phi = solve_group_csp(csp)
    assert phi is not None
    mapping = group_csp_solution_to_graph_iso(g, h, phi)
    assert mapping == {"a": "c", "b": "d"}


def test_graphs_to_csp_example_pair_unsatisfiable():
    g, h = paper_example_pair()
    csp = graphs_to_group_csp(g, h)
    assert solve_group_csp(csp) is None
    assert not brute_force_isomorphic(g, h).isomorphic


def test_graphs_to_csp_size_mismatch_rejected():
    g = ColouredGraph(["a"], {"a": "r"}, [])
    h = ColouredGraph(["b", "c"], {"b": "r", "c": "r"}, [])
    with pytest.raises(CSPError):
        graphs_to_group_csp(g, h)


def test_graphs_to_csp_round_trip_random():
    rng = random.Random(29)
    hits = 0
    for _ in range(12):
        g, h, _ = random_coloured_pair(rng, 6, rng.randint(2, 3),
                                       isomorphic=rng.random() < 0.6)
        want = brute_force_isomorphic(g, h).isomorphic
        try:
            csp = graphs_to_group_csp(g, h)
        except CSPError:
            assert not want
            continue
        phi = solve_group_csp(csp)
        assert (phi is not None) == want
        if phi is not None:
            hits += 1
            mapping = group_csp_solution_to_graph_iso(g, h, phi)
            assert verify_isomorphism(g, h, mapping)
    assert hits
