"""Coset constraint satisfaction over finite groups, parity instances, and
the gadget-graph encoding whose isomorphism mirrors CSP satisfiability.

Groups are explicit element tables: the two-element group appears
multiplicatively as {1, -1}, symmetric groups as tuples of images. Every
constraint relation is validated as a genuine coset at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .domains import CoefficientDomain
from .graphs import ColouredGraph, GraphError, edge_key, verify_isomorphism
from .linalg import LinearRow, LinearSystem, SetVariable, solve_linear_system_field


class CSPError(ValueError):
    pass


class FiniteGroup:
    """Finite group given by its element list and multiplication table."""

    def __init__(self, name: str, elements: Sequence, op):
        self.name = name
        self.elements: Tuple = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self._table = {(a, b): op(a, b) for a in elements for b in elements}
        self.identity = self._find_identity()
        self._inverse = {a: next(b for b in elements if self._table[(a, b)] == self.identity)
                         for a in elements}

    def _find_identity(self):
        for e in self.elements:
            if all(self._table[(e, a)] == a and self._table[(a, e)] == a
                   for a in self.elements):
                return e
        raise CSPError("element table has no identity")

    def op(self, a, b):
        return self._table[(a, b)]

    def inv(self, a):
        return self._inverse[a]

    def __contains__(self, a):
        return a in self._index

    def __len__(self):
        return len(self.elements)

    @staticmethod
    def z2_multiplicative() -> "FiniteGroup":
        return FiniteGroup("Z2", (1, -1), lambda a, b: a * b)

    @staticmethod
    def symmetric(ell: int) -> "FiniteGroup":
        elems = sorted(itertools.permutations(range(ell)))
        return FiniteGroup(f"S{ell}", elems,
                           lambda a, b: tuple(a[b[i]] for i in range(ell)))


def element_label(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join(str(x) for x in e) + ")"
    return str(e)


@dataclass(frozen=True)
class Constraint:
    name: str
    variables: Tuple[str, ...]
    coset: Tuple[Tuple, ...]  # explicit tuples over the group, sorted


class GroupCSP:
    """Constraints are cosets of subgroups of Gamma^k, listed explicitly."""

    def __init__(self, group: FiniteGroup, constraints: Iterable[Constraint]):
        self.group = group
        self.constraints: List[Constraint] = list(constraints)
        names = [c.name for c in self.constraints]
        if len(set(names)) != len(names):
            raise CSPError("constraint names must be unique")
        self.variables: List[str] = sorted({x for c in self.constraints for x in c.variables})
        for c in self.constraints:
            self._validate(c)

    def _validate(self, c: Constraint):
        if not c.coset:
            raise CSPError(f"constraint {c.name} has an empty relation")
        arity = len(c.variables)
        for t in c.coset:
            if len(t) != arity:
                raise CSPError(f"constraint {c.name} mixes arities")
            for e in t:
                if e not in self.group:
                    raise CSPError(f"constraint {c.name} uses a non-group element")
        gamma = c.coset[0]
        inv = tuple(self.group.inv(e) for e in gamma)
        delta = {tuple(self.group.op(a, b) for a, b in zip(t, inv)) for t in c.coset}
        ident = tuple(self.group.identity for _ in range(arity))
        if ident not in delta:
            raise CSPError(f"constraint {c.name}: relation is not a coset")
        for s in delta:
            if tuple(self.group.inv(e) for e in s) not in delta:
                raise CSPError(f"constraint {c.name}: recovered set lacks inverses")
            for t in delta:
                if tuple(self.group.op(a, b) for a, b in zip(s, t)) not in delta:
                    raise CSPError(f"constraint {c.name}: recovered set is not closed")
        regenerated = {tuple(self.group.op(a, b) for a, b in zip(s, gamma)) for s in delta}
        if regenerated != set(c.coset):
            raise CSPError(f"constraint {c.name}: coset not closed under its subgroup")

    def subgroup_of(self, c: Constraint) -> Tuple[Tuple, ...]:
        gamma = c.coset[0]
        inv = tuple(self.group.inv(e) for e in gamma)
        return tuple(sorted({tuple(self.group.op(a, b) for a, b in zip(t, inv))
                             for t in c.coset}))

    def homogenised(self) -> "GroupCSP":
        """Replace every coset by its underlying subgroup."""
        return GroupCSP(self.group, [
            Constraint(c.name, c.variables, self.subgroup_of(c))
            for c in self.constraints
        ])

    def satisfied_by(self, phi: Dict[str, object]) -> bool:
        for c in self.constraints:
            tup = tuple(phi[x] for x in c.variables)
            if tup not in set(c.coset):
                return False
        return True


def solve_group_csp(csp: GroupCSP) -> Optional[Dict[str, object]]:
    """Backtracking search; intended for small instances and cross-checks."""
    order = sorted(csp.variables)
    support: Dict[str, List[Constraint]] = {x: [] for x in order}
    for c in csp.constraints:
        for x in set(c.variables):
            support[x].append(c)
    assignment: Dict[str, object] = {}

    def consistent(c: Constraint) -> bool:
        values = [assignment.get(x) for x in c.variables]
        if any(v is None for v in values):
            return any(all(w is None or w == t[i] for i, w in enumerate(values))
                       for t in c.coset)
        return tuple(values) in set(c.coset)

    def backtrack(idx: int) -> bool:
        if idx == len(order):
            return True
        x = order[idx]
        for val in csp.group.elements:
            assignment[x] = val
            if all(consistent(c) for c in support[x]) and backtrack(idx + 1):
                return True
            del assignment[x]
        return False

    if backtrack(0):
        assert csp.satisfied_by(assignment)
        return dict(assignment)
    return None


# ---------------------------------------------------------------------------
# parity (Tseitin) instances over the two-element group
# ---------------------------------------------------------------------------


def edge_name(u: str, v: str) -> str:
    a, b = edge_key(u, v)
    return f"z({a},{b})"


@dataclass
class TseitinInstance:
    """Base graph, charged vertex set, and the recorded per-vertex edge order."""

    graph: ColouredGraph
    charges: Tuple[str, ...]
    orderings: Dict[str, Tuple[str, ...]]  # vertex -> ordered incident edge names

    @property
    def charge_parity(self) -> int:
        return len(self.charges) % 2

    @staticmethod
    def make(graph: ColouredGraph, charges: Iterable[str]) -> "TseitinInstance":
        charge_set = tuple(sorted(set(charges)))
        for t in charge_set:
            if not graph.has_vertex(t):
                raise GraphError(f"charged vertex {t!r} not in the base graph")
        orderings = {}
        for v in graph.vertices:
            incident = sorted(edge_name(v, u) for u in graph.neighbours(v))
            orderings[v] = tuple(incident)
        return TseitinInstance(graph, charge_set, orderings)


def tseitin_csp(instance: TseitinInstance) -> GroupCSP:
    """One +-1 variable per edge; per vertex the even-product coset, or the
    odd-product coset exactly on charged vertices (the twist rides on the
    first edge in the recorded order)."""
    g = instance.graph
    constraints = []
    charge_set = set(instance.charges)
    for v in g.vertices:
        edges = instance.orderings[v]
        if not edges:
            raise GraphError(f"isolated vertex {v!r}")
        k = len(edges)
        target = -1 if v in charge_set else 1
        coset = tuple(sorted(t for t in itertools.product((1, -1), repeat=k)
                             if _product(t) == target))
        constraints.append(Constraint(f"C@{v}", edges, coset))
    return GroupCSP(FiniteGroup.z2_multiplicative(), constraints)


def _product(t: Sequence[int]) -> int:
    out = 1
    for x in t:
        out *= x
    return out


def solve_parity_csp(csp: GroupCSP) -> Optional[Dict[str, int]]:
    """Gaussian elimination over F2 on the affine conditions carved out by
    each coset; solutions are re-verified against every constraint."""
    if csp.group.name != "Z2":
        raise CSPError("parity solving needs the two-element group")
    vars_ = csp.variables
    index = {x: i for i, x in enumerate(vars_)}
    f2 = CoefficientDomain.prime_field(2)
    rows: List[LinearRow] = []
    for c in csp.constraints:
        k = len(c.variables)
        # additive view: 1 -> 0, -1 -> 1
        vectors = [tuple(0 if e == 1 else 1 for e in t) for t in c.coset]
        gamma = vectors[0]
        space = [tuple(a ^ b for a, b in zip(t, gamma)) for t in vectors]
        for check in _orthogonal_complement(space, k):
            coeffs: Dict[SetVariable, int] = {}
            for i, bit in enumerate(check):
                if bit:
                    sv = SetVariable((index[c.variables[i]],))
                    coeffs[sv] = (coeffs.get(sv, 0) + 1) % 2
            rhs = sum(b * g for b, g in zip(check, gamma)) % 2
            rows.append(LinearRow.make(coeffs, rhs, f2))
    system = LinearSystem(f2, rows)
    res = solve_linear_system_field(system, want_farkas=False)
    if not res.solvable:
        return None
    bits = {x: 0 for x in vars_}
    for sv, val in (res.assignment or {}).items():
        bits[vars_[sv.ids[0]]] = val
    phi = {x: 1 if bits[x] == 0 else -1 for x in vars_}
    if not csp.satisfied_by(phi):
        raise AssertionError("parity solution failed coset verification")
    return phi


def _orthogonal_complement(vectors: Sequence[Tuple[int, ...]], k: int) -> List[Tuple[int, ...]]:
    """Basis of the F2 orthogonal complement of the span of the given vectors.

    Enumerates all 2^k candidates; constraint arities are vertex degrees, so
    k stays small.
    """
    if k > 16:
        raise CSPError("constraint arity too large for parity extraction")
    orthogonal = []
    for bits in itertools.product((0, 1), repeat=k):
        if any(bits) and all(sum(b * v for b, v in zip(bits, vec)) % 2 == 0
                             for vec in vectors):
            orthogonal.append(bits)
    # echelon-filter down to a basis
    basis: List[Tuple[int, ...]] = []
    pivots: List[int] = []
    for vec in orthogonal:
        cur = list(vec)
        for b, p in zip(basis, pivots):
            if cur[p]:
                cur = [a ^ c for a, c in zip(cur, b)]
        lead = next((i for i, a in enumerate(cur) if a), None)
        if lead is not None:
            basis.append(tuple(cur))
            pivots.append(lead)
    return basis


# ---------------------------------------------------------------------------
# gadget graphs
# ---------------------------------------------------------------------------


@dataclass
class GadgetGraphPair:
    """The CSP gadget graph and its homogenised twin, with provenance maps."""

    csp: GroupCSP
    g: ColouredGraph
    twin: ColouredGraph
    variable_vertex: Dict[Tuple[str, object], str]       # (variable, element) -> vertex
    constraint_vertex: Dict[Tuple[str, Tuple], str]      # (constraint, tuple) -> vertex
    twin_variable_vertex: Dict[Tuple[str, object], str]
    twin_constraint_vertex: Dict[Tuple[str, Tuple], str]


def _gadget_graph(csp: GroupCSP, tag: str):
    verts: List[str] = []
    colours: Dict[str, str] = {}
    edges: List[Tuple[str, str]] = []
    ecolours: Dict[Tuple[str, str], Optional[str]] = {}
    var_vertex: Dict[Tuple[str, object], str] = {}
    con_vertex: Dict[Tuple[str, Tuple], str] = {}
    for x in csp.variables:
        for gamma in csp.group.elements:
            name = f"{tag}|{x}|{element_label(gamma)}"
            verts.append(name)
            colours[name] = f"L[{x}]"
            var_vertex[(x, gamma)] = name
    for c in csp.constraints:
        for beta in c.coset:
            name = f"{tag}|{c.name}|{element_label(beta)}"
            verts.append(name)
            colours[name] = f"L[{c.name}]"
            con_vertex[(c.name, beta)] = name
            for i, (xi, bi) in enumerate(zip(c.variables, beta)):
                k = edge_key(name, var_vertex[(xi, bi)])
                if k not in ecolours:
                    edges.append(k)
                    ecolours[k] = f"M[{i + 1}]"
                elif ecolours[k] != f"M[{i + 1}]":
                    raise CSPError("conflicting edge colours in gadget; "
                                   "repeated variables in one constraint tuple")
    graph = ColouredGraph(verts, colours, edges, ecolours)
    return graph, var_vertex, con_vertex


def build_gadget_graphs(csp: GroupCSP) -> GadgetGraphPair:
    """One vertex per (variable, element) and per coset member, edges wired by
    coordinates; the twin uses the homogenised constraints with the same
    constraint colours, so the two graphs share a colour vocabulary."""
    g, var_v, con_v = _gadget_graph(csp, "G")
    hom = csp.homogenised()
    twin, tvar_v, tcon_v = _gadget_graph(hom, "G~")
    return GadgetGraphPair(csp, g, twin, var_v, con_v, tvar_v, tcon_v)


def csp_solution_to_isomorphism(pair: GadgetGraphPair,
                                phi: Dict[str, object]) -> Dict[str, str]:
    """Right-translate variable vertices by the solution; constraint vertices
    move coordinatewise. Verified as a colour-preserving isomorphism."""
    csp = pair.csp
    if not csp.satisfied_by(phi):
        raise CSPError("assignment does not satisfy the constraints")
    mapping: Dict[str, str] = {}
    for (x, gamma), vname in pair.variable_vertex.items():
        target = csp.group.op(gamma, csp.group.inv(phi[x]))
        mapping[vname] = pair.twin_variable_vertex[(x, target)]
    for c in csp.constraints:
        phis = [phi[x] for x in c.variables]
        for beta in c.coset:
            shifted = tuple(csp.group.op(b, csp.group.inv(p)) for b, p in zip(beta, phis))
            mapping[pair.constraint_vertex[(c.name, beta)]] = \
                pair.twin_constraint_vertex[(c.name, shifted)]
    if not verify_isomorphism(pair.g, pair.twin, mapping):
        raise AssertionError("constructed map failed isomorphism verification")
    return mapping


def isomorphism_to_csp_solution(pair: GadgetGraphPair,
                                mapping: Dict[str, str]) -> Dict[str, object]:
    """Read the solution off the preimages of the identity-element vertices."""
    csp = pair.csp
    if not verify_isomorphism(pair.g, pair.twin, mapping):
        raise CSPError("map is not an isomorphism of the gadget pair")
    inverse = {w: v for v, w in mapping.items()}
    phi: Dict[str, object] = {}
    for x in csp.variables:
        unit_vertex = pair.twin_variable_vertex[(x, csp.group.identity)]
        source = inverse[unit_vertex]
        gamma = next(gam for (xx, gam), name in pair.variable_vertex.items()
                     if name == source and xx == x)
        phi[x] = gamma
    if not csp.satisfied_by(phi):
        raise AssertionError("decoded assignment failed constraint verification")
    return phi


# ---------------------------------------------------------------------------
# coloured graph pairs as symmetric-group CSPs
# ---------------------------------------------------------------------------


def graphs_to_group_csp(g: ColouredGraph, h: ColouredGraph) -> GroupCSP:
    """Encode colour-preserving isomorphisms as a CSP over a symmetric group:
    one variable per colour, unary padding constraints, and one binary coset
    per colour pair relating the class enumerations."""
    hist_g = g.colour_histogram()
    hist_h = h.colour_histogram()
    if hist_g != hist_h:
        raise CSPError("per-colour sizes differ; the graphs are not isomorphic")
    colours = sorted(hist_g)
    classes_g = {c: sorted(v for v in g.vertices if g.colours[v] == c) for c in colours}
    classes_h = {c: sorted(w for w in h.vertices if h.colours[w] == c) for c in colours}
    ell = max(hist_g.values())
    group = FiniteGroup.symmetric(ell)

    constraints: List[Constraint] = []
    for c in colours:
        li = hist_g[c]
        perms = tuple(sorted((p,) for p in group.elements
                             if all(p[j] == j for j in range(li, ell))))
        constraints.append(Constraint(f"P[{c}]", (f"x[{c}]",), perms))

    for a in colours:
        for b in colours:
            if a > b:
                continue
            la, lb = hist_g[a], hist_g[b]
            va, vb = classes_g[a], classes_g[b]
            wa, wb = classes_h[a], classes_h[b]
            rel = []
            for pa in group.elements:
                if any(pa[j] != j for j in range(la, ell)):
                    continue
                for pb in group.elements:
                    if any(pb[j] != j for j in range(lb, ell)):
                        continue
                    ok = True
                    for i in range(la):
                        for j in range(lb):
                            if a == b and i == j:
                                continue
                            e1 = g.has_edge(va[i], vb[j]) if va[i] != vb[j] else None
                            if e1 is None:
                                continue
                            e2 = h.has_edge(wa[pa[i]], wb[pb[j]])
                            if e1 != e2:
                                ok = False
                                break
                            if e1 and g.edge_colour(va[i], vb[j]) != h.edge_colour(wa[pa[i]], wb[pb[j]]):
                                ok = False
                                break
                        if not ok:
                            break
                    if ok and (a != b or pa == pb):
                        rel.append((pa, pb))
            if not rel:
                raise CSPError(f"no admissible pairing for colours {a!r}, {b!r}; "
                               "the graphs are not isomorphic")
            constraints.append(Constraint(f"R[{a},{b}]", (f"x[{a}]", f"x[{b}]"),
                                          tuple(sorted(rel))))
    return GroupCSP(group, constraints)


def group_csp_solution_to_graph_iso(g: ColouredGraph, h: ColouredGraph,
                                    phi: Dict[str, object]) -> Dict[str, str]:
    hist = g.colour_histogram()
    mapping: Dict[str, str] = {}
    for c in sorted(hist):
        vs = sorted(v for v in g.vertices if g.colours[v] == c)
        ws = sorted(w for w in h.vertices if h.colours[w] == c)
        perm = phi[f"x[{c}]"]
        for i, v in enumerate(vs):
            mapping[v] = ws[perm[i]]
    if not verify_isomorphism(g, h, mapping):
        raise AssertionError("symmetric-group solution did not decode to an isomorphism")
    return mapping
