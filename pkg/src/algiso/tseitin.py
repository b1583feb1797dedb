"""Parity polynomials in the +-1 encoding, and the low-degree map that sends
pair variables of a gadget-graph isomorphism system to polynomials in the
edge variables.

In the +-1 encoding a parity instance becomes: z_e^2 - 1 per edge, and
1 +- prod z_e per vertex (minus exactly on uncharged vertices), with the
product taken in the recorded edge order. The pair-variable map sends an
edge-vertex pair to (1 - zeta*eta*z)/2 and a constraint-vertex pair to the
product of such factors, one per incident edge; everything colour-incompatible
maps to zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .domains import CoefficientDomain, DomainError
from .graphs import ColouredGraph, GraphError
from .groupcsp import GadgetGraphPair, TseitinInstance, build_gadget_graphs, tseitin_csp
from .isosystems import IsoSystem, build_iso_system
from .linalg import EchelonBasis
from .polynomials import Monomial, Polynomial, VariableSpace

Q = CoefficientDomain.rationals()


@dataclass
class TseitinSystem:
    """The +-1 parity polynomials for one instance."""

    instance: TseitinInstance
    domain: CoefficientDomain
    space: VariableSpace                  # edge variables z(...)
    square_rows: List[Polynomial]         # z^2 - 1 per edge
    vertex_rows: Dict[str, Polynomial]    # per base vertex: 1 -+ prod z

    def polynomials(self) -> List[Polynomial]:
        return [*self.square_rows, *self.vertex_rows.values()]

    def charge_sign(self, vertex: str) -> int:
        """-1 on charged vertices, +1 elsewhere."""
        return -1 if vertex in set(self.instance.charges) else 1


def tseitin_polynomials(instance: TseitinInstance,
                        domain: CoefficientDomain = Q) -> TseitinSystem:
    """Emit the parity system; the one-to-one solution correspondence with the
    coset instance needs characteristic != 2."""
    if domain.characteristic == 2:
        raise DomainError("the +-1 encoding degenerates in characteristic 2")
    space = VariableSpace()
    g = instance.graph
    edge_vars: Dict[str, int] = {}
    for v in g.vertices:
        for name in instance.orderings[v]:
            if name not in edge_vars:
                edge_vars[name] = space.add(name)
    squares = []
    for name in sorted(edge_vars):
        vid = edge_vars[name]
        squares.append(Polynomial(domain, {
            Monomial(((vid, 2),)): domain.one(),
            Monomial.one(): domain.neg(domain.one()),
        }))
    vertex_rows: Dict[str, Polynomial] = {}
    charge_set = set(instance.charges)
    for v in g.vertices:
        mono = Monomial.from_support(edge_vars[name] for name in instance.orderings[v])
        sign = domain.one() if v in charge_set else domain.neg(domain.one())
        vertex_rows[v] = Polynomial(domain, {Monomial.one(): domain.one(), mono: sign})
    return TseitinSystem(instance, domain, space, squares, vertex_rows)


def parity_solution_to_assignment(system: TseitinSystem,
                                  phi: Dict[str, int]) -> Dict[int, object]:
    """Translate a coset solution (+-1 valued) to a polynomial assignment."""
    d = system.domain
    return {system.space.id_of(x): d.from_int(val) for x, val in phi.items()}


# ---------------------------------------------------------------------------
# the pair-variable reduction map
# ---------------------------------------------------------------------------


@dataclass
class ReductionMap:
    """Pair variables of the gadget isomorphism system as edge polynomials."""

    instance: TseitinInstance
    degree: int                       # base regularity k
    pair: GadgetGraphPair
    iso: IsoSystem                    # over the rationals, pruned
    tseitin: TseitinSystem
    images: Dict[int, Polynomial]     # pair-variable id -> polynomial in z

    def image(self, pair_var: int) -> Polynomial:
        return self.images.get(pair_var, Polynomial.zero(self.tseitin.domain))

    def substitute(self, p: Polynomial) -> Polynomial:
        """Apply the map to a polynomial over pair variables."""
        return p.substitute({vid: self.image(vid) for vid in p.variables()})


def reduction_polynomials(instance: TseitinInstance) -> ReductionMap:
    """Build the pair-variable map for an even-regular base graph.

    Edge pairs map to (1 - zeta*eta*z(e))/2; constraint pairs to the product
    of the per-coordinate factors; colour-incompatible pairs to zero.
    """
    g = instance.graph
    k = g.is_regular()
    if k is None or k % 2 != 0:
        raise GraphError("reduction map needs an even-regular base graph")
    csp = tseitin_csp(instance)
    pair = build_gadget_graphs(csp)
    iso = build_iso_system(pair.g, pair.twin, Q, prune=True)
    tsys = tseitin_polynomials(instance, Q)

    var_side = {name: (x, gamma) for (x, gamma), name in pair.variable_vertex.items()}
    twin_var_side = {name: (x, gamma) for (x, gamma), name in pair.twin_variable_vertex.items()}
    con_side = {name: (c, beta) for (c, beta), name in pair.constraint_vertex.items()}
    twin_con_side = {name: (c, beta) for (c, beta), name in pair.twin_constraint_vertex.items()}
    con_vars = {c.name: c.variables for c in csp.constraints}

    half = Fraction(1, 2)
    images: Dict[int, Polynomial] = {}
    for vid in iso.variables.live_ids():
        v, w = iso.variables.pair_of[vid]
        if v in var_side and w in twin_var_side:
            (x, zeta) = var_side[v]
            (x2, eta) = twin_var_side[w]
            if x != x2:
                continue
            z = Polynomial.variable(Q, tsys.space.id_of(x))
            images[vid] = (Polynomial.one(Q) - z.scale(Fraction(zeta * eta))).scale(half)
        elif v in con_side and w in twin_con_side:
            (cname, zeta_t) = con_side[v]
            (cname2, eta_t) = twin_con_side[w]
            if cname != cname2:
                continue
            poly = Polynomial.one(Q)
            for edge, zi, ei in zip(con_vars[cname], zeta_t, eta_t):
                z = Polynomial.variable(Q, tsys.space.id_of(edge))
                poly = poly * (Polynomial.one(Q) - z.scale(Fraction(zi * ei))).scale(half)
            images[vid] = poly
    return ReductionMap(instance, k, pair, iso, tsys, images)


def multilinear_mod_squares(p: Polynomial) -> Polynomial:
    """Normal form modulo the relations z^2 = 1 (all exponents reduced mod 2)."""
    d = p.domain
    acc: Dict[Monomial, object] = {}
    for m, c in p.terms.items():
        reduced = Monomial([(v, 1) for v, e in m.pairs if e % 2 == 1])
        acc[reduced] = d.add(acc.get(reduced, d.zero()), c)
    return Polynomial(d, acc)


def parity_sum_identity(ell: int, epsilon: int, zs: Sequence[int],
                        domain: CoefficientDomain = Q) -> Tuple[Polynomial, Polynomial]:
    """Both sides of the parity-sum expansion: the sum over sign tuples with
    product epsilon of prod (1 - eta_i z_i) vs 2^(ell-1) (1 + (-1)^ell epsilon prod z_i)."""
    if ell < 1:
        raise ValueError("ell must be positive")
    lhs = Polynomial.zero(domain)
    for etas in itertools.product((1, -1), repeat=ell):
        prod = 1
        for e in etas:
            prod *= e
        if prod != epsilon:
            continue
        term = Polynomial.one(domain)
        for eta, z in zip(etas, zs):
            term = term * (Polynomial.one(domain)
                           - Polynomial.variable(domain, z).scale(domain.from_int(eta)))
        lhs = lhs + term
    sign = 1 if ell % 2 == 0 else -1
    rhs = (Polynomial.one(domain)
           + Polynomial(domain, {Monomial.from_support(zs): domain.from_int(sign * epsilon)}))
    rhs = rhs.scale(domain.from_int(2 ** (ell - 1)))
    return lhs, rhs


@dataclass
class IdentityReport:
    """Outcome of the symbolic checks on one reduction map."""

    booleanisation_checked: int = 0
    parity_sum_cases: int = 0
    row_sums_checked: int = 0
    column_sums_checked: int = 0
    conflicts_checked: int = 0
    shared_endpoint_conflicts: int = 0
    adjacency_conflicts: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_reduction_identities(rmap: ReductionMap, max_parity_ell: int = 6) -> IdentityReport:
    """Exact symbolic verification of the map's defining identities.

    (a) each edge-pair image f satisfies f^2 - f = (z^2 - 1)/4; (b) the
    parity-sum expansion for all lengths up to the cap; (c) row and column
    sums collapse to 0 on edge vertices and to -(1 - s*prod z)/2 on constraint
    vertices, where s is the vertex charge sign; (d) conflict products with a
    shared endpoint or an adjacency mismatch vanish modulo z^2 = 1.
    """
    report = IdentityReport()
    rep_k = rmap.degree
    if rep_k > 6:
        raise GraphError("symbolic expansion budget: regularity above 6")
    tsys = rmap.tseitin
    iso = rmap.iso
    pair = rmap.pair
    quarter = Fraction(1, 4)

    var_side = {name: (x, gamma) for (x, gamma), name in pair.variable_vertex.items()}
    twin_var_side = {name: (x, gamma) for (x, gamma), name in pair.twin_variable_vertex.items()}
    con_side = {name: (c, b) for (c, b), name in pair.constraint_vertex.items()}

    # (a) booleanisation of edge-pair factors
    for vid, img in rmap.images.items():
        v, w = iso.variables.pair_of[vid]
        if v in var_side:
            x, _ = var_side[v]
            z2 = Polynomial(Q, {Monomial(((tsys.space.id_of(x), 2),)): Fraction(1)})
            want = (z2 - Polynomial.one(Q)).scale(quarter)
            if img * img - img != want:
                report.failures.append(f"edge booleanisation failed at {v},{w}")
            report.booleanisation_checked += 1

    # (b) parity-sum expansion; generic in its variables, so fresh ids suffice
    for ell in range(1, max_parity_ell + 1):
        for eps in (1, -1):
            lhs, rhs = parity_sum_identity(ell, eps, list(range(ell)))
            if lhs != rhs:
                report.failures.append(f"parity sum failed at ell={ell}, eps={eps}")
            report.parity_sum_cases += 1

    # (c) row and column sums
    half = Fraction(1, 2)
    g_vertices = pair.g.vertices
    twin_vertices = pair.twin.vertices
    for v in g_vertices:
        total = Polynomial.zero(Q)
        for w in twin_vertices:
            pid = iso.variables.var(v, w)
            if pid is not None:
                total = total + rmap.image(pid)
        total = total - Polynomial.one(Q)
        if v in var_side:
            if not total.is_zero():
                report.failures.append(f"row sum not zero at edge vertex {v}")
        else:
            cname, _ = con_side[v]
            base_vertex = cname.split("C@", 1)[1]
            s = tsys.charge_sign(base_vertex)
            prod = Monomial.from_support(tsys.space.id_of(e)
                                         for e in rmap.instance.orderings[base_vertex])
            want = (Polynomial.one(Q)
                    - Polynomial(Q, {prod: Fraction(s)})).scale(-half)
            if total != want:
                report.failures.append(f"row sum mismatch at constraint vertex {v}")
        report.row_sums_checked += 1
    for w in twin_vertices:
        total = Polynomial.zero(Q)
        for v in g_vertices:
            pid = iso.variables.var(v, w)
            if pid is not None:
                total = total + rmap.image(pid)
        total = total - Polynomial.one(Q)
        if w in twin_var_side:
            if not total.is_zero():
                report.failures.append(f"column sum not zero at edge vertex {w}")
        else:
            cname = w.split("|")[1]
            base_vertex = cname.split("C@", 1)[1]
            s = tsys.charge_sign(base_vertex)
            prod = Monomial.from_support(tsys.space.id_of(e)
                                         for e in rmap.instance.orderings[base_vertex])
            want = (Polynomial.one(Q)
                    - Polynomial(Q, {prod: Fraction(s)})).scale(-half)
            if total != want:
                report.failures.append(f"column sum mismatch at constraint vertex {w}")
        report.column_sums_checked += 1

    # (d) conflict products vanish modulo the square relations
    for conflict in iso.conflicts:
        mono = next(iter(conflict.monomials()))
        ids = mono.variables()
        if len(ids) == 2:
            a, b = ids
        else:
            a = b = ids[0]
        fa, fb = rmap.image(a), rmap.image(b)
        if fa.is_zero() or fb.is_zero():
            continue
        va, wa = iso.variables.pair_of[a]
        vb, wb = iso.variables.pair_of[b]
        shared = va == vb or wa == wb
        if not multilinear_mod_squares(fa * fb).is_zero():
            report.failures.append(f"conflict product not in the square ideal: {va},{wa} / {vb},{wb}")
        report.conflicts_checked += 1
        if shared:
            report.shared_endpoint_conflicts += 1
        else:
            report.adjacency_conflicts += 1
    return report


# ---------------------------------------------------------------------------
# bounded-degree ideal membership
# ---------------------------------------------------------------------------


def tseitin_ideal_slice(tsys: TseitinSystem, degree_cap: int) -> EchelonBasis:
    """Echelon basis of the degree-bounded slice of the ideal generated by the
    parity rows and the square relations, in the multilinear quotient."""
    basis = EchelonBasis(tsys.domain)
    n_ids = list(tsys.space.ids())
    for row in tsys.vertex_rows.values():
        base = multilinear_mod_squares(row)
        for size in range(0, min(degree_cap, len(n_ids)) + 1):
            for combo in itertools.combinations(n_ids, size):
                m = Monomial.from_support(combo)
                prod = multilinear_mod_squares(base.mul_monomial(m))
                if prod.degree <= degree_cap and not prod.is_zero():
                    basis.insert(dict(prod.terms))
    return basis


def reduce_mod_tseitin_ideal(p: Polynomial, basis: EchelonBasis) -> Polynomial:
    nf = multilinear_mod_squares(p)
    rem, _ = basis.reduce(dict(nf.terms))
    return Polynomial(p.domain, rem)


def substitution_reduces_to_zero(rmap: ReductionMap, degree_cap: Optional[int] = None) -> bool:
    """Whether every isomorphism-system row lands in the bounded ideal slice
    after substitution; the boolean axioms are checked alongside."""
    cap = degree_cap if degree_cap is not None else 2 * rmap.degree
    basis = tseitin_ideal_slice(rmap.tseitin, cap)
    polys = list(rmap.iso.polynomials())
    polys.extend(rmap.iso.boolean_axioms())
    for q in polys:
        image = rmap.substitute(q)
        if image.degree > cap:
            return False
        if not reduce_mod_tseitin_ideal(image, basis).is_zero():
            return False
    return True
