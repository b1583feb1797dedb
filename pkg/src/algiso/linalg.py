"""Exact linear algebra: echelon bases, field solving with Farkas witnesses,
and integer solving through the Smith normal form.

Columns are arbitrary hashable, totally ordered keys (monomials for span
computations, set-variables for multilinearised systems). A basis row's pivot
is its largest column, so with a graded column order every basis row's degree
is the degree of its pivot.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .domains import CoefficientDomain, DomainError


@functools.total_ordering
class SetVariable:
    """Variable X_S indexed by a set of base-variable ids; X_{} is the unit."""

    __slots__ = ("ids", "_hash")

    def __init__(self, ids: Iterable[int] = ()):
        object.__setattr__(self, "ids", tuple(sorted(set(ids))))
        object.__setattr__(self, "_hash", hash(self.ids))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("SetVariable is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, SetVariable) and self.ids == other.ids

    def __lt__(self, other: "SetVariable"):
        # cardinality first, then lexicographic on the sorted id tuples
        return (len(self.ids), self.ids) < (len(other.ids), other.ids)

    def __len__(self):
        return len(self.ids)

    def issubset(self, other: "SetVariable") -> bool:
        return set(self.ids) <= set(other.ids)

    def union(self, other: "SetVariable") -> "SetVariable":
        return SetVariable(self.ids + other.ids)

    def text(self, space=None) -> str:
        if not self.ids:
            return "X{}"
        names = [space.name_of(v) if space is not None else f"x{v}" for v in self.ids]
        return "X{" + ",".join(names) + "}"

    def __repr__(self):
        return f"SetVariable({self.ids})"


EMPTY_SET_VARIABLE = SetVariable(())


@dataclass(frozen=True)
class LinearRow:
    """One equation  sum coeffs[c] * X_c = rhs  over set-variable columns."""

    coeffs: Tuple[Tuple[SetVariable, object], ...]
    rhs: object

    @staticmethod
    def make(coeffs: Dict[SetVariable, object], rhs, domain: CoefficientDomain) -> "LinearRow":
        items = tuple(sorted(((c, v) for c, v in coeffs.items() if not domain.is_zero(v)),
                             key=lambda t: t[0]))
        return LinearRow(items, rhs)

    def coeff_dict(self) -> Dict[SetVariable, object]:
        return dict(self.coeffs)

    def is_contradiction(self, domain: CoefficientDomain) -> bool:
        return not self.coeffs and not domain.is_zero(self.rhs)


class LinearSystem:
    """Sparse linear system over set-variables with right-hand sides.

    Rows that are identically 0 = 0 are dropped at construction. An all-zero
    row with nonzero right-hand side is kept; it marks the system trivially
    unsolvable.
    """

    def __init__(self, domain: CoefficientDomain, rows: Iterable[LinearRow]):
        self.domain = domain
        kept = []
        for row in rows:
            if not row.coeffs and domain.is_zero(row.rhs):
                continue
            kept.append(row)
        self.rows: List[LinearRow] = kept

    def columns(self) -> List[SetVariable]:
        cols = set()
        for row in self.rows:
            cols.update(c for c, _ in row.coeffs)
        return sorted(cols)

    def __len__(self):
        return len(self.rows)


class EchelonBasis:
    """Row space in echelon form; pivot = largest column of each row.

    Pivot coefficients are 1 and every stored row's non-pivot columns are
    strictly smaller than its pivot, so reduction against the basis strictly
    decreases the current leading column and terminates.
    """

    def __init__(self, domain: CoefficientDomain):
        if not domain.is_field:
            raise DomainError("echelon bases need a field domain")
        self.domain = domain
        self.rows: Dict[object, Dict[object, object]] = {}

    def __len__(self):
        return len(self.rows)

    def pivots(self):
        return self.rows.keys()

    def reduce(self, vec: Dict[object, object]) -> Tuple[Dict[object, object], Dict[object, object]]:
        """Fully reduce vec; returns (remainder, combination by pivot).

        vec = sum_p combination[p] * row[p] + remainder, and the remainder has
        no entry in any pivot column.
        """
        d = self.domain
        work = {c: v for c, v in vec.items() if not d.is_zero(v)}
        remainder: Dict[object, object] = {}
        combination: Dict[object, object] = {}
        while work:
            lead = max(work)
            coeff = work.pop(lead)
            row = self.rows.get(lead)
            if row is None:
                remainder[lead] = coeff
                continue
            combination[lead] = d.add(combination.get(lead, d.zero()), coeff)
            for c, v in row.items():
                if c == lead:
                    continue
                cur = work.get(c, d.zero())
                nxt = d.sub(cur, d.mul(coeff, v))
                if d.is_zero(nxt):
                    work.pop(c, None)
                else:
                    work[c] = nxt
        return remainder, {p: c for p, c in combination.items() if not d.is_zero(c)}

    def insert(self, vec: Dict[object, object]):
        """Reduce and adjoin; returns the new pivot, or None if vec is in the span."""
        d = self.domain
        remainder, _ = self.reduce(vec)
        if not remainder:
            return None
        pivot = max(remainder)
        inv = d.inv(remainder[pivot])
        self.rows[pivot] = {c: d.mul(inv, v) for c, v in remainder.items()}
        return pivot

    def contains(self, vec: Dict[object, object]) -> bool:
        remainder, _ = self.reduce(vec)
        return not remainder


def reduce_against_basis(vec: Dict[object, object], basis: EchelonBasis):
    """Exact division-style reduction of a sparse vector against a basis."""
    if basis.domain.kind == "Z":
        raise DomainError("reduction needs a field domain")
    return basis.reduce(vec)


# ---------------------------------------------------------------------------
# field solving with verified outcomes
# ---------------------------------------------------------------------------

_RHS = (0,)  # sentinel column, ordered below every wrapped real column


def _wrap(col) -> tuple:
    return (1, col)


@dataclass
class FieldSolveResult:
    solvable: bool
    assignment: Optional[Dict[SetVariable, object]] = None
    farkas: Optional[Dict[int, object]] = None  # original row index -> weight


def _verify_field_solution(system: LinearSystem, assignment: Dict[SetVariable, object]):
    d = system.domain
    for i, row in enumerate(system.rows):
        total = d.zero()
        for c, v in row.coeffs:
            total = d.add(total, d.mul(v, assignment[c]))
        if total != row.rhs:
            raise AssertionError(f"row {i} not satisfied by computed solution")


def _verify_farkas(system: LinearSystem, farkas: Dict[int, object]):
    d = system.domain
    lhs: Dict[SetVariable, object] = {}
    rhs = d.zero()
    for i, w in farkas.items():
        row = system.rows[i]
        for c, v in row.coeffs:
            lhs[c] = d.add(lhs.get(c, d.zero()), d.mul(w, v))
        rhs = d.add(rhs, d.mul(w, row.rhs))
    if any(not d.is_zero(v) for v in lhs.values()) or rhs != d.one():
        raise AssertionError("Farkas combination does not expand to 0 = 1")


def solve_linear_system_field(system: LinearSystem, want_farkas: bool = True) -> FieldSolveResult:
    """Decide a linear system over Q or F_p.

    Solvable systems come back with an exactly verified assignment (free
    columns at 0). Unsolvable ones carry a Farkas combination of the original
    rows expanding to 0 = 1, verified before return.
    """
    d = system.domain
    if not d.is_field:
        raise DomainError("field solver needs Q or F_p; use the integer solver for Z")

    def run(track: bool):
        # augmented vectors {column: coeff, _RHS: rhs} read as "coeffs = rhs";
        # linear combinations preserve that reading, so a vector reducing to
        # {_RHS: c} with c != 0 is the contradiction 0 = c.
        basis: Dict[tuple, Dict[tuple, object]] = {}
        prov: Dict[tuple, Dict[int, object]] = {}
        order = sorted(range(len(system.rows)), key=lambda i: len(system.rows[i].coeffs))
        for i in order:
            row = system.rows[i]
            vec = {_wrap(c): v for c, v in row.coeffs}
            if not d.is_zero(row.rhs):
                vec[_RHS] = row.rhs
            trace = {i: d.one()} if track else None
            while vec:
                lead = max(vec)
                ex = basis.get(lead)
                if ex is None:
                    coeff = vec[lead]
                    inv = d.inv(coeff)
                    basis[lead] = {c: d.mul(inv, v) for c, v in vec.items()}
                    if track:
                        prov[lead] = {j: d.mul(inv, w) for j, w in trace.items()}
                    break
                coeff = vec.pop(lead)
                for c, v in ex.items():
                    if c == lead:
                        continue
                    cur = vec.get(c, d.zero())
                    nxt = d.sub(cur, d.mul(coeff, v))
                    if d.is_zero(nxt):
                        vec.pop(c, None)
                    else:
                        vec[c] = nxt
                if track:
                    for j, w in prov[lead].items():
                        cur = trace.get(j, d.zero())
                        nxt = d.sub(cur, d.mul(coeff, w))
                        if d.is_zero(nxt):
                            trace.pop(j, None)
                        else:
                            trace[j] = nxt
            if _RHS in basis:
                return basis, prov, True
        return basis, prov, False

    basis, prov, contradiction = run(track=False)
    if contradiction:
        if not want_farkas:
            return FieldSolveResult(False)
        basis, prov, contradiction = run(track=True)
        assert contradiction
        farkas = prov[_RHS]
        _verify_farkas(system, farkas)
        return FieldSolveResult(False, farkas=farkas)

    # pivot rows read X_lead + smaller terms = rhs; assign pivots in
    # increasing column order so the smaller terms are already known
    assignment: Dict[SetVariable, object] = {c: d.zero() for c in system.columns()}
    for lead in sorted(basis):
        row = basis[lead]
        acc = d.zero()
        for c, v in row.items():
            if c == lead or c == _RHS:
                continue
            acc = d.add(acc, d.mul(v, assignment[c[1]]))
        assignment[lead[1]] = d.sub(row.get(_RHS, d.zero()), acc)
    _verify_field_solution(system, assignment)
    return FieldSolveResult(True, assignment=assignment)


# ---------------------------------------------------------------------------
# integers: Smith normal form and integer solving
# ---------------------------------------------------------------------------


@dataclass
class SmithDecomposition:
    """A = U * D * V with U, V unimodular and D diagonal (divisibility chain)."""

    diag: List[int]
    u: List[List[int]]       # m x m
    v: List[List[int]]       # n x n
    u_inv: List[List[int]]   # tracked row transform:  u_inv * A * v_inv = D
    v_inv: List[List[int]]


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _mat_mul(a: List[List[int]], b: List[List[int]]) -> List[List[int]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += x * bt[j]
    return out


def integer_determinant(a: List[List[int]]) -> int:
    """Fraction-free Bareiss elimination; exact integer determinant."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(matrix: Sequence[Sequence[int]], verify: bool = True,
                      rng: Optional[random.Random] = None) -> SmithDecomposition:
    """Diagonalise an integer matrix with unimodular row/column transforms.

    Pivots are chosen with minimal absolute value to contain coefficient
    growth. The decomposition A = U D V is verified exactly for matrices with
    at most 500 columns, and on sampled rows above that.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    d = [list(map(int, row)) for row in matrix]
    u = _identity(m)        # accumulates inverse row ops:  A = u * D * v
    u_inv = _identity(m)    # accumulates row ops:          D = u_inv * A * v_inv
    v = _identity(n)
    v_inv = _identity(n)

    def row_add(i, j, q):  # row_i += q * row_j  (on D), update trackers
        if q == 0:
            return
        d[i] = [a + q * b for a, b in zip(d[i], d[j])]
        u_inv[i] = [a + q * b for a, b in zip(u_inv[i], u_inv[j])]
        # inverse op on u: col_j -= q * col_i
        for r in range(m):
            u[r][j] -= q * u[r][i]

    def col_add(j, i, q):  # col_j += q * col_i
        if q == 0:
            return
        for r in range(m):
            d[r][j] += q * d[r][i]
        for r in range(n):
            v_inv[r][j] += q * v_inv[r][i]
        # inverse op on v: row_i -= q * row_j
        v[i] = [a - q * b for a, b in zip(v[i], v[j])]

    def row_swap(i, j):
        if i == j:
            return
        d[i], d[j] = d[j], d[i]
        u_inv[i], u_inv[j] = u_inv[j], u_inv[i]
        for r in range(m):
            u[r][i], u[r][j] = u[r][j], u[r][i]

    def col_swap(i, j):
        if i == j:
            return
        for r in range(len(d)):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        for r in range(n):
            v_inv[r][i], v_inv[r][j] = v_inv[r][j], v_inv[r][i]
        v[i], v[j] = v[j], v[i]

    def row_negate(i):
        d[i] = [-a for a in d[i]]
        u_inv[i] = [-a for a in u_inv[i]]
        for r in range(m):
            u[r][i] = -u[r][i]

    rank = min(m, n)
    t = 0
    while t < rank:
        # minimal |entry| pivot in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = d[i][j]
                if a != 0 and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if abs(a) == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, bi, bj = best
        row_swap(t, bi)
        col_swap(t, bj)
        while True:
            # clear column t with nearest-quotient reductions
            moved = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    q = _nearest_quotient(d[i][t], d[t][t])
                    row_add(i, t, -q)
                    if d[i][t] != 0:
                        row_swap(t, i)  # remainder is strictly smaller
                        moved = True
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    q = _nearest_quotient(d[t][j], d[t][t])
                    col_add(j, t, -q)
                    if d[t][j] != 0:
                        col_swap(t, j)
                        moved = True
            if not moved:
                break
        if d[t][t] < 0:
            row_negate(t)
        t += 1

    # enforce the divisibility chain d1 | d2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            a, b = d[i][i], d[i + 1][i + 1]
            if a != 0 and b % a != 0:
                col_add(i, i + 1, 1)  # brings b's row back into play
                _rediagonalise_pair(d, i, row_add, col_add, row_swap, col_swap, row_negate, m, n)
                changed = True

    diag = [d[i][i] for i in range(min(m, n))]
    snf = SmithDecomposition(diag, u, v, u_inv, v_inv)
    if verify:
        _verify_snf(matrix, snf, rng=rng)
    return snf


def _nearest_quotient(a: int, b: int) -> int:
    """q minimising |a - q*b|."""
    q, r = divmod(a, b)
    # Python's remainder takes the divisor's sign, so q+1 always shrinks |r|
    if 2 * abs(r) > abs(b):
        q += 1
    return q


def _rediagonalise_pair(d, i, row_add, col_add, row_swap, col_swap, row_negate, m, n):
    # after mixing columns i and i+1, restore diagonal form on the 2x2 block
    while True:
        if d[i + 1][i] != 0:
            q = _nearest_quotient(d[i + 1][i], d[i][i]) if d[i][i] != 0 else 0
            if d[i][i] != 0:
                row_add(i + 1, i, -q)
            if d[i + 1][i] != 0:
                row_swap(i, i + 1)
                continue
        if d[i][i + 1] != 0:
            q = _nearest_quotient(d[i][i + 1], d[i][i]) if d[i][i] != 0 else 0
            if d[i][i] != 0:
                col_add(i + 1, i, -q)
            if d[i][i + 1] != 0:
                col_swap(i, i + 1)
                continue
        break
    if d[i][i] < 0:
        row_negate(i)
    if d[i + 1][i + 1] < 0:
        row_negate(i + 1)


def _verify_snf(matrix, snf: SmithDecomposition, rng: Optional[random.Random] = None):
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    dmat = [[0] * n for _ in range(m)]
    for i, val in enumerate(snf.diag):
        dmat[i][i] = val
    if n <= 500:
        prod = _mat_mul(_mat_mul(snf.u, dmat), snf.v)
        if prod != [list(map(int, row)) for row in matrix]:
            raise AssertionError("U*D*V does not reproduce the input matrix")
        if m and abs(integer_determinant(snf.u)) != 1:
            raise AssertionError("U is not unimodular")
        if n and abs(integer_determinant(snf.v)) != 1:
            raise AssertionError("V is not unimodular")
    else:
        rng = rng or random.Random(0)
        dv = _mat_mul(dmat, snf.v)
        for _ in range(20):
            i = rng.randrange(m)
            rowprod = [sum(snf.u[i][t] * dv[t][j] for t in range(m)) for j in range(n)]
            if rowprod != list(map(int, matrix[i])):
                raise AssertionError("sampled row of U*D*V mismatches the input")


@dataclass
class IntegerSolveResult:
    solvable: bool
    assignment: Optional[Dict[SetVariable, int]] = None


def _verify_integer_solution(system: LinearSystem, assignment: Dict[SetVariable, int]):
    for i, row in enumerate(system.rows):
        total = 0
        for c, v in row.coeffs:
            total += v * assignment[c]
        if total != row.rhs:
            raise AssertionError(f"row {i} not satisfied by integer solution")


def solve_linear_system_integers(system: LinearSystem) -> IntegerSolveResult:
    """Decide integer solvability of a sparse linear system.

    Unit-coefficient rows are eliminated by substitution first (each such step
    is a unimodular change of variables); the residual dense core is decided
    through the Smith normal form. Returned solutions are re-substituted into
    the original rows and verified exactly.
    """
    if system.domain.kind != "Z":
        raise DomainError("integer solver needs the Z domain")
    for row in system.rows:
        for _, v in row.coeffs:
            if not isinstance(v, int):
                raise DomainError("non-integer coefficient")
        if not isinstance(row.rhs, int):
            raise DomainError("non-integer right-hand side")

    rows: Dict[int, Dict[SetVariable, int]] = {}
    rhs: Dict[int, int] = {}
    col_rows: Dict[SetVariable, set] = {}
    for i, row in enumerate(system.rows):
        rows[i] = dict(row.coeffs)
        rhs[i] = row.rhs
        for c, _ in row.coeffs:
            col_rows.setdefault(c, set()).add(i)

    def normalise(i: int) -> bool:
        """Drop zero entries, divide by content; False on contradiction."""
        r = rows[i]
        for c in [c for c, v in r.items() if v == 0]:
            del r[c]
            col_rows[c].discard(i)
        if not r:
            if rhs[i] != 0:
                return False
            del rows[i], rhs[i]
            return True
        g = 0
        for v in r.values():
            g = gcd(g, abs(v))
        if g > 1:
            if rhs[i] % g != 0:
                return False
            for c in r:
                r[c] //= g
            rhs[i] //= g
        return True

    substitutions: List[Tuple[SetVariable, Dict[SetVariable, int], int]] = []
    pending = sorted(rows)
    for i in pending:
        if i in rows and not normalise(i):
            return IntegerSolveResult(False)

    while True:
        pick = None
        for i in sorted(rows):
            r = rows[i]
            unit = next((c for c in sorted(r) if abs(r[c]) == 1), None)
            if unit is not None:
                if pick is None or len(r) < pick[2]:
                    pick = (i, unit, len(r))
                if len(r) <= 2:
                    break
        if pick is None:
            break
        i, c0, _ = pick
        r = rows.pop(i)
        b = rhs.pop(i)
        s = r.pop(c0)   # s in {1, -1}
        col_rows[c0].discard(i)
        for c in r:
            col_rows[c].discard(i)
        # c0 = (b - sum r[c]*X_c) / s
        expr = {c: -v * s for c, v in r.items()}
        const = b * s
        substitutions.append((c0, expr, const))
        touched = list(col_rows.get(c0, ()))
        for j in touched:
            rj = rows[j]
            a = rj.pop(c0, 0)
            col_rows[c0].discard(j)
            if a == 0:
                continue
            for c, v in expr.items():
                nv = rj.get(c, 0) + a * v
                if nv == 0:
                    rj.pop(c, None)
                    col_rows[c].discard(j)
                else:
                    rj[c] = nv
                    col_rows.setdefault(c, set()).add(j)
            rhs[j] -= a * const
            if not normalise(j):
                return IntegerSolveResult(False)

    assignment: Dict[SetVariable, int] = {c: 0 for c in system.columns()}

    if rows:
        # dense Smith-normal-form core on the residue
        residual_cols = sorted({c for r in rows.values() for c in r})
        col_index = {c: j for j, c in enumerate(residual_cols)}
        row_ids = sorted(rows)
        a = [[0] * len(residual_cols) for _ in row_ids]
        b = [rhs[i] for i in row_ids]
        for ri, i in enumerate(row_ids):
            for c, v in rows[i].items():
                a[ri][col_index[c]] = v
        snf = smith_normal_form(a)
        ub = [sum(snf.u_inv[i][t] * b[t] for t in range(len(b))) for i in range(len(b))]
        y = [0] * len(residual_cols)
        for i in range(len(b)):
            di = snf.diag[i] if i < len(snf.diag) else 0
            if di == 0:
                if ub[i] != 0:
                    return IntegerSolveResult(False)
            else:
                q, rem = divmod(ub[i], di)
                if rem != 0:
                    return IntegerSolveResult(False)
                y[i] = q
        x = [sum(snf.v_inv[i][t] * y[t] for t in range(len(y))) for i in range(len(residual_cols))]
        for c, j in col_index.items():
            assignment[c] = x[j]

    for c0, expr, const in reversed(substitutions):
        assignment[c0] = const + sum(v * assignment[c] for c, v in expr.items())

    _verify_integer_solution(system, assignment)
    return IntegerSolveResult(True, assignment=assignment)

