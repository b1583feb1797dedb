"""Exact coefficient domains: rationals, prime fields, and the integers.

Every arithmetic operation is exact. Rationals are backed by
``fractions.Fraction`` (arbitrary precision), prime-field elements are ints
reduced into ``[0, p)``, integer elements are plain ints. There is no
floating point anywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class DomainError(ValueError):
    """Raised for invalid domain construction or unsupported operations."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class CoefficientDomain:
    """One of Q, F_p (p prime) or Z, with exact element arithmetic.

    Elements are Fraction (Q) or int (F_p canonical in [0, p), Z arbitrary).
    Division is defined for the field kinds; over Z only when exact.
    """

    kind: str  # "Q" | "Fp" | "Z"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Q", "Fp", "Z"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == "Fp":
            if not is_prime(self.p):
                raise DomainError(f"{self.p} is not prime")
        elif self.p != 0:
            raise DomainError("p is only meaningful for prime fields")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rationals() -> "CoefficientDomain":
        return CoefficientDomain("Q")

    @staticmethod
    def prime_field(p: int) -> "CoefficientDomain":
        return CoefficientDomain("Fp", p)

    @staticmethod
    def integers() -> "CoefficientDomain":
        return CoefficientDomain("Z")

    @staticmethod
    def from_name(name: str) -> "CoefficientDomain":
        """Parse a domain label: "Q", "Z", or "F<p>"."""
        if name == "Q":
            return CoefficientDomain.rationals()
        if name == "Z":
            return CoefficientDomain.integers()
        if name.startswith("F") and name[1:].isdigit():
            return CoefficientDomain.prime_field(int(name[1:]))
        raise DomainError(f"cannot parse domain name {name!r}")

    # -- structure ---------------------------------------------------------

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.kind == "Fp" else self.kind

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Fp")

    # -- element arithmetic -------------------------------------------------

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def from_int(self, n: int):
        if self.kind == "Q":
            return Fraction(n)
        if self.kind == "Fp":
            return n % self.p
        return int(n)

    def add(self, a, b):
        c = a + b
        return c % self.p if self.kind == "Fp" else c

    def sub(self, a, b):
        c = a - b
        return c % self.p if self.kind == "Fp" else c

    def mul(self, a, b):
        c = a * b
        return c % self.p if self.kind == "Fp" else c

    def neg(self, a):
        return (-a) % self.p if self.kind == "Fp" else -a

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "Q":
            return 1 / Fraction(a)
        if self.kind == "Fp":
            return pow(a, self.p - 2, self.p)
        if a in (1, -1):
            return a
        raise DomainError(f"{a} is not invertible over Z")

    def div(self, a, b):
        if self.is_zero(b):
            raise ZeroDivisionError("division by zero")
        if self.kind == "Q":
            return Fraction(a) / Fraction(b)
        if self.kind == "Fp":
            return (a * self.inv(b)) % self.p
        q, r = divmod(a, b)
        if r != 0:
            raise DomainError(f"{a} is not divisible by {b} over Z")
        return q

    def is_zero(self, a) -> bool:
        return a == 0

    # -- text form (used by the JSON schemas) --------------------------------

    def format(self, a) -> str:
        if self.kind == "Q":
            f = Fraction(a)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return str(a)

    def parse(self, s: str):
        if self.kind == "Q":
            return Fraction(s)
        v = int(s)
        return v % self.p if self.kind == "Fp" else v


RATIONALS = CoefficientDomain.rationals()
INTEGERS = CoefficientDomain.integers()
GF2 = CoefficientDomain.prime_field(2)
