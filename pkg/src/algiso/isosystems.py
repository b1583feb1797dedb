"""The isomorphism polynomial system for a graph pair, degree lifts,
multilinearisation, and assignment checking.

The system's 0/1 solutions are exactly the colour- and adjacency-preserving
bijections between the two graphs: row sums and column sums force a bijection
and one conflict quadratic per non-local-isomorphism pair kills everything
else. Boolean axioms x^2 - x are never materialised as rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .domains import CoefficientDomain, DomainError
from .graphs import ColouredGraph, GraphError
from .linalg import EMPTY_SET_VARIABLE, LinearRow, LinearSystem, SetVariable
from .pebble import is_position_local_iso, pair_respects_colours, pairs_compatible
from .polynomials import Monomial, Polynomial, VariableSpace

Pair = Tuple[str, str]


def pair_variable_name(v: str, w: str) -> str:
    return f"x({v},{w})"


def is_local_isomorphism(pi: Iterable[Pair], g: ColouredGraph, h: ColouredGraph) -> bool:
    """Whether a set of pairs is an injective partial map preserving
    adjacency, non-adjacency, vertex colours and edge colours."""
    return is_position_local_iso(g, h, tuple(pi))


class PairVariableSpace:
    """Registry of the pair variables x(v,w) with an optional pruning mask.

    With pruning on, variables whose singleton pair violates vertex colours
    are identically zero and excluded from every emitted polynomial.
    """

    def __init__(self, g: ColouredGraph, h: ColouredGraph, prune: bool = True):
        self.g = g
        self.h = h
        self.prune = prune
        self.space = VariableSpace()
        self.pair_of: Dict[int, Pair] = {}
        self._id_of: Dict[Pair, Optional[int]] = {}
        for v in g.vertices:
            for w in h.vertices:
                if prune and not pair_respects_colours(g, h, (v, w)):
                    self._id_of[(v, w)] = None
                    continue
                vid = self.space.add(pair_variable_name(v, w))
                self.pair_of[vid] = (v, w)
                self._id_of[(v, w)] = vid

    def var(self, v: str, w: str) -> Optional[int]:
        """Variable id, or None when the pair is pruned away."""
        return self._id_of[(v, w)]

    def live_ids(self) -> List[int]:
        return sorted(self.pair_of)

    def __len__(self):
        return len(self.pair_of)


@dataclass
class IsoSystem:
    """Row/column-sum rows plus conflict quadratics for one graph pair."""

    g: ColouredGraph
    h: ColouredGraph
    domain: CoefficientDomain
    variables: PairVariableSpace
    row_sum: List[Polynomial] = field(default_factory=list)      # one per w in H
    column_sum: List[Polynomial] = field(default_factory=list)   # one per v in G
    conflicts: List[Polynomial] = field(default_factory=list)

    def polynomials(self) -> List[Polynomial]:
        return [*self.row_sum, *self.column_sum, *self.conflicts]

    def boolean_axioms(self) -> List[Polynomial]:
        return [Polynomial.boolean_axiom(self.domain, vid)
                for vid in self.variables.live_ids()]


def build_iso_system(g: ColouredGraph, h: ColouredGraph, domain: CoefficientDomain,
                     prune: bool = True) -> IsoSystem:
    """Emit the isomorphism system over the given domain.

    Conflict quadratics are emitted once per unordered pair of live variables
    whose pair set is not a local isomorphism; with pruning off this includes
    the degenerate x^2 rows of colour-mismatched singletons.
    """
    if len(g) < 2 and len(h) < 2:
        raise GraphError("need at least two vertices on one side")
    vars_ = PairVariableSpace(g, h, prune=prune)
    sys_ = IsoSystem(g, h, domain, vars_)
    one = Polynomial.one(domain)

    for w in h.vertices:
        terms = [vars_.var(v, w) for v in g.vertices]
        poly = Polynomial.from_pairs(domain, [(Monomial.variable(t), domain.one())
                                              for t in terms if t is not None]) - one
        sys_.row_sum.append(poly)
    for v in g.vertices:
        terms = [vars_.var(v, w) for w in h.vertices]
        poly = Polynomial.from_pairs(domain, [(Monomial.variable(t), domain.one())
                                              for t in terms if t is not None]) - one
        sys_.column_sum.append(poly)

    live = vars_.live_ids()
    if not prune:
        for vid in live:
            v, w = vars_.pair_of[vid]
            if not pair_respects_colours(g, h, (v, w)):
                sys_.conflicts.append(Polynomial(domain, {Monomial(((vid, 2),)): domain.one()}))
    for i, vid in enumerate(live):
        p = vars_.pair_of[vid]
        for vid2 in live[i + 1:]:
            q = vars_.pair_of[vid2]
            if not prune:
                if not pair_respects_colours(g, h, p) or not pair_respects_colours(g, h, q):
                    conflict = True
                else:
                    conflict = not pairs_compatible(g, h, p, q)
            else:
                conflict = not pairs_compatible(g, h, p, q)
            if conflict:
                m = Monomial.variable(vid) * Monomial.variable(vid2)
                sys_.conflicts.append(Polynomial(domain, {m: domain.one()}))
    return sys_


# ---------------------------------------------------------------------------
# lifting and multilinearisation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedPolynomial:
    multiplier: Monomial
    axiom_index: int
    product: Polynomial


def lift_system(polys: Sequence[Polynomial], r: int,
                variable_ids: Sequence[int]) -> List[LiftedPolynomial]:
    """All products m * p of degree <= r with m a multilinear monomial over
    the given variables (including m = 1).

    Axioms of degree above r contribute no products. Restricting multipliers
    to multilinear monomials loses nothing after multilinearisation: a
    squared multiplier has the same set-variable image as its support.
    """
    if r < 1:
        raise ValueError("lift degree must be at least 1")
    out: List[LiftedPolynomial] = []
    ids = sorted(variable_ids)
    for idx, p in enumerate(polys):
        if p.is_zero() or p.degree > r:
            continue
        room = r - p.degree
        for size in range(0, room + 1):
            for combo in combinations(ids, size):
                m = Monomial.from_support(combo)
                out.append(LiftedPolynomial(m, idx, p.mul_monomial(m)))
    return out


def multilinearise_polynomial(p: Polynomial) -> Tuple[Dict[SetVariable, object], object]:
    """Collapse each monomial to the set-variable of its support; the constant
    moves to the right-hand side. Returns (coeffs, rhs)."""
    d = p.domain
    coeffs: Dict[SetVariable, object] = {}
    rhs = d.zero()
    for m, c in p.terms.items():
        if m.is_one():
            rhs = d.sub(rhs, c)
            continue
        sv = SetVariable(m.variables())
        coeffs[sv] = d.add(coeffs.get(sv, d.zero()), c)
    return {c: v for c, v in coeffs.items() if not d.is_zero(v)}, rhs


def multilinearise(polys: Sequence[Polynomial], domain: CoefficientDomain) -> LinearSystem:
    """The multilinearisation of a polynomial set as a linear system."""
    rows = []
    for p in polys:
        coeffs, rhs = multilinearise_polynomial(p)
        rows.append(LinearRow.make(coeffs, rhs, domain))
    return LinearSystem(domain, rows)


@dataclass
class MlinTrace:
    """A multilinearised lift that remembers where every row came from."""

    system: LinearSystem
    origins: List[LiftedPolynomial]  # aligned with system.rows


def multilinearise_lift(lift: Sequence[LiftedPolynomial],
                        domain: CoefficientDomain) -> MlinTrace:
    rows: List[LinearRow] = []
    origins: List[LiftedPolynomial] = []
    for item in lift:
        coeffs, rhs = multilinearise_polynomial(item.product)
        if not coeffs and domain.is_zero(rhs):
            continue
        rows.append(LinearRow.make(coeffs, rhs, domain))
        origins.append(item)
    system = LinearSystem(domain, rows)
    assert len(system.rows) == len(origins)
    return MlinTrace(system, origins)


def build_axb_system(iso: IsoSystem) -> List[Polynomial]:
    """Adjacency-matrix balance rows: for every pair (v, w) the neighbours-of-v
    column sum minus the neighbours-of-w row sum, plus the sum rows."""
    g, h, d, vars_ = iso.g, iso.h, iso.domain, iso.variables
    out: List[Polynomial] = []
    for v in g.vertices:
        for w in h.vertices:
            terms: Dict[Monomial, object] = {}
            for v2 in g.neighbours(v):
                vid = vars_.var(v2, w)
                if vid is not None:
                    m = Monomial.variable(vid)
                    terms[m] = d.add(terms.get(m, d.zero()), d.one())
            for w2 in h.neighbours(w):
                vid = vars_.var(v, w2)
                if vid is not None:
                    m = Monomial.variable(vid)
                    terms[m] = d.add(terms.get(m, d.zero()), d.neg(d.one()))
            out.append(Polynomial(d, terms))
    out.extend(iso.row_sum)
    out.extend(iso.column_sum)
    return out


# ---------------------------------------------------------------------------
# assignments
# ---------------------------------------------------------------------------


class MlinAssignment:
    """Set-variable assignment with the empty set pinned to 1."""

    def __init__(self, domain: CoefficientDomain, values: Dict[SetVariable, object]):
        self.domain = domain
        self.values = dict(values)
        self.values[EMPTY_SET_VARIABLE] = domain.one()

    def __getitem__(self, sv: SetVariable):
        return self.values[sv]

    def get(self, sv: SetVariable, default=None):
        return self.values.get(sv, default)

    def __contains__(self, sv: SetVariable):
        return sv in self.values


@dataclass
class Violation:
    kind: str  # "row" | "pair" | "missing"
    detail: object

    def __bool__(self):
        return False


def verify_assignment(alpha: MlinAssignment, system: LinearSystem,
                      downward_zero: bool = False):
    """Check every row exactly; with the flag also check that zero values
    propagate upward to supersets among the system's columns.

    Returns True or a Violation naming the first failure.
    """
    d = system.domain
    cols = system.columns()
    for c in cols:
        if c not in alpha:
            return Violation("missing", c)
    for i, row in enumerate(system.rows):
        total = d.zero()
        for c, v in row.coeffs:
            total = d.add(total, d.mul(v, alpha[c]))
        if total != row.rhs:
            return Violation("row", i)
    if downward_zero:
        zeros = [c for c in cols if d.is_zero(alpha[c])]
        zero_sets = [set(c.ids) for c in zeros]
        for c in cols:
            if d.is_zero(alpha[c]):
                continue
            cset = set(c.ids)
            for z, zset in zip(zeros, zero_sets):
                if zset <= cset:
                    return Violation("pair", (z, c))
    return True
