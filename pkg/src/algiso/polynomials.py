"""Sparse multivariate polynomials over an exact coefficient domain.

Variables are dense integer ids handed out by a :class:`VariableSpace`, which
also keeps the id <-> printable-name mapping. The monomial order is graded
lexicographic: degree first, ties broken lexicographically with
earlier-registered variables ranked higher. The order is total, which is what
the degree-bounded span computations rely on.
"""

from __future__ import annotations

import functools
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .domains import CoefficientDomain, DomainError


class VariableSpace:
    """Registry of variables: dense, stable ids plus human-readable names."""

    def __init__(self):
        self._names: List[str] = []
        self._ids: Dict[str, int] = {}

    def add(self, name: str) -> int:
        if name in self._ids:
            raise ValueError(f"variable {name!r} already registered")
        vid = len(self._names)
        self._names.append(name)
        self._ids[name] = vid
        return vid

    def ensure(self, name: str) -> int:
        if name in self._ids:
            return self._ids[name]
        return self.add(name)

    def id_of(self, name: str) -> int:
        return self._ids[name]

    def name_of(self, vid: int) -> str:
        return self._names[vid]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)

    def ids(self) -> range:
        return range(len(self._names))

    def names(self) -> Tuple[str, ...]:
        return tuple(self._names)


@functools.total_ordering
class Monomial:
    """Immutable monomial: sorted (variable id, positive exponent) pairs."""

    __slots__ = ("pairs", "degree", "_hash")

    def __init__(self, pairs: Iterable[Tuple[int, int]] = ()):
        items = sorted((v, e) for v, e in pairs if e != 0)
        for _, e in items:
            if e < 0:
                raise ValueError("negative exponent")
        object.__setattr__(self, "pairs", tuple(items))
        object.__setattr__(self, "degree", sum(e for _, e in items))
        object.__setattr__(self, "_hash", hash(self.pairs))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Monomial is immutable")

    @staticmethod
    def one() -> "Monomial":
        return _ONE

    @staticmethod
    def variable(vid: int) -> "Monomial":
        return Monomial(((vid, 1),))

    @staticmethod
    def from_support(ids: Iterable[int]) -> "Monomial":
        return Monomial((v, 1) for v in ids)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.pairs == other.pairs

    def __lt__(self, other: "Monomial"):
        # graded lex; on equal degree the smaller variable id with the larger
        # exponent wins, i.e. earlier variables rank higher
        if self.degree != other.degree:
            return self.degree < other.degree
        a, b = self.pairs, other.pairs
        for (va, ea), (vb, eb) in zip(a, b):
            if va != vb:
                # the monomial holding the earlier variable is larger
                return va > vb
            if ea != eb:
                return ea < eb
        # equal degree with an equal pair prefix forces equality
        return False

    def __mul__(self, other: "Monomial") -> "Monomial":
        exps = dict(self.pairs)
        for v, e in other.pairs:
            exps[v] = exps.get(v, 0) + e
        return Monomial(exps.items())

    def variables(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.pairs)

    def support(self) -> frozenset:
        return frozenset(v for v, _ in self.pairs)

    def is_one(self) -> bool:
        return not self.pairs

    def is_multilinear(self) -> bool:
        return all(e == 1 for _, e in self.pairs)

    def support_monomial(self) -> "Monomial":
        return self if self.is_multilinear() else Monomial.from_support(self.variables())

    def exponent(self, vid: int) -> int:
        for v, e in self.pairs:
            if v == vid:
                return e
        return 0

    def text(self, space: Optional[VariableSpace] = None) -> str:
        if not self.pairs:
            return "1"
        parts = []
        for v, e in self.pairs:
            name = space.name_of(v) if space is not None else f"x{v}"
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def __repr__(self):
        return f"Monomial({self.text()})"


_ONE = Monomial(())


class Polynomial:
    """Sparse polynomial: Monomial -> nonzero coefficient, plus its domain.

    Instances are immutable; all operations return new polynomials and
    canonicalise (no stored zero coefficients). The zero polynomial has
    degree -1.
    """

    __slots__ = ("domain", "terms", "_hash")

    def __init__(self, domain: CoefficientDomain, terms: Dict[Monomial, object]):
        clean = {m: c for m, c in terms.items() if not domain.is_zero(c)}
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(domain: CoefficientDomain) -> "Polynomial":
        return Polynomial(domain, {})

    @staticmethod
    def constant(domain: CoefficientDomain, value) -> "Polynomial":
        return Polynomial(domain, {Monomial.one(): value})

    @staticmethod
    def one(domain: CoefficientDomain) -> "Polynomial":
        return Polynomial.constant(domain, domain.one())

    @staticmethod
    def variable(domain: CoefficientDomain, vid: int) -> "Polynomial":
        return Polynomial(domain, {Monomial.variable(vid): domain.one()})

    @staticmethod
    def from_pairs(domain: CoefficientDomain, pairs: Iterable[Tuple[Monomial, object]]) -> "Polynomial":
        acc: Dict[Monomial, object] = {}
        for m, c in pairs:
            if m in acc:
                acc[m] = domain.add(acc[m], c)
            else:
                acc[m] = c
        return Polynomial(domain, acc)

    @staticmethod
    def boolean_axiom(domain: CoefficientDomain, vid: int) -> "Polynomial":
        """x^2 - x for the given variable."""
        one = domain.one()
        return Polynomial(domain, {
            Monomial(((vid, 2),)): one,
            Monomial.variable(vid): domain.neg(one),
        })

    # -- basic structure -----------------------------------------------------

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, m: Monomial):
        return self.terms.get(m, self.domain.zero())

    def constant_term(self):
        return self.terms.get(Monomial.one(), self.domain.zero())

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms)

    def monomials(self) -> Iterator[Monomial]:
        return iter(self.terms)

    def variables(self) -> frozenset:
        out = set()
        for m in self.terms:
            out.update(m.variables())
        return frozenset(out)

    def as_monomial(self) -> Optional[Tuple[Monomial, object]]:
        """The (monomial, coefficient) pair if this is a single term, else None."""
        if len(self.terms) != 1:
            return None
        ((m, c),) = self.terms.items()
        return m, c

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.domain == other.domain
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.domain, frozenset(self.terms.items()))))
        return self._hash

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.domain != other.domain:
            raise DomainError("polynomial domain mismatch")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        d = self.domain
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = d.add(acc[m], c) if m in acc else c
        return Polynomial(d, acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        d = self.domain
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = d.sub(acc[m], c) if m in acc else d.neg(c)
        return Polynomial(d, acc)

    def __neg__(self) -> "Polynomial":
        d = self.domain
        return Polynomial(d, {m: d.neg(c) for m, c in self.terms.items()})

    def scale(self, a) -> "Polynomial":
        d = self.domain
        if d.is_zero(a):
            return Polynomial.zero(d)
        return Polynomial(d, {m: d.mul(a, c) for m, c in self.terms.items()})

    def mul_monomial(self, m: Monomial, coeff=None) -> "Polynomial":
        d = self.domain
        a = d.one() if coeff is None else coeff
        if d.is_zero(a):
            return Polynomial.zero(d)
        return Polynomial(d, {t * m: d.mul(a, c) for t, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        d = self.domain
        acc: Dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                c = d.mul(c1, c2)
                acc[m] = d.add(acc[m], c) if m in acc else c
        return Polynomial(d, acc)

    def evaluate(self, assignment: Dict[int, object]):
        """Evaluate under variable id -> domain element (total on variables used)."""
        d = self.domain
        total = d.zero()
        for m, c in self.terms.items():
            val = c
            for v, e in m.pairs:
                x = assignment[v]
                for _ in range(e):
                    val = d.mul(val, x)
            total = d.add(total, val)
        return total

    def substitute(self, images: Dict[int, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials for variables; ids absent from images stay."""
        d = self.domain
        out = Polynomial.zero(d)
        for m, c in self.terms.items():
            part = Polynomial.constant(d, c)
            passthrough: Dict[int, int] = {}
            for v, e in m.pairs:
                if v in images:
                    img = images[v]
                    for _ in range(e):
                        part = part * img
                else:
                    passthrough[v] = e
            if passthrough:
                part = part.mul_monomial(Monomial(passthrough.items()))
            out = out + part
        return out

    def multilinear_reduction(self) -> Tuple["Polynomial", Dict[int, "Polynomial"]]:
        """Rewrite every x^e (e >= 2) to x, collecting the boolean cofactors.

        Returns (ml, g) with  self = ml + sum_x g[x] * (x^2 - x)  exactly, and
        deg(g[x]) <= deg(self) - 2.
        """
        d = self.domain
        g: Dict[int, Dict[Monomial, object]] = {}
        work = dict(self.terms)
        done: Dict[Monomial, object] = {}
        while work:
            m, c = work.popitem()
            sq = next((v for v, e in m.pairs if e >= 2), None)
            if sq is None:
                done[m] = d.add(done[m], c) if m in done else c
                if d.is_zero(done[m]):
                    del done[m]
                continue
            # c*x^e*mu = c*x^(e-1)*mu + c*x^(e-2)*mu * (x^2 - x)
            exps = dict(m.pairs)
            exps[sq] -= 1
            lower = Monomial(exps.items())
            exps[sq] -= 1
            cof = Monomial(exps.items())
            bucket = g.setdefault(sq, {})
            bucket[cof] = d.add(bucket[cof], c) if cof in bucket else c
            work[lower] = d.add(work[lower], c) if lower in work else c
            if d.is_zero(work[lower]):
                del work[lower]
        gmap = {v: Polynomial(d, ts) for v, ts in g.items()}
        return Polynomial(d, done), {v: p for v, p in gmap.items() if not p.is_zero()}

    def text(self, space: Optional[VariableSpace] = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            parts.append(f"{self.domain.format(self.terms[m])}*{m.text(space)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.text()})"


def poly_combine(ops: Sequence[tuple]) -> Polynomial:
    """Fold a sequence of exact polynomial operations; returns the last result.

    Each op is a tuple: ("add", p, q), ("scale", a, p), ("mul_monomial", m, p)
    or ("mul", p, q). Operands may be Polynomial values or integer indices
    into the results of earlier ops.
    """
    if not ops:
        raise ValueError("empty operation sequence")
    results: List[Polynomial] = []

    def resolve(x) -> Polynomial:
        return results[x] if isinstance(x, int) else x

    for op in ops:
        tag = op[0]
        if tag == "add":
            results.append(resolve(op[1]) + resolve(op[2]))
        elif tag == "scale":
            results.append(resolve(op[2]).scale(op[1]))
        elif tag == "mul_monomial":
            m = op[1]
            if not isinstance(m, Monomial):
                raise TypeError("mul_monomial needs a Monomial multiplier")
            results.append(resolve(op[2]).mul_monomial(m))
        elif tag == "mul":
            results.append(resolve(op[1]) * resolve(op[2]))
        else:
            raise ValueError(f"unknown polynomial op {tag!r}")
    return results[-1]
