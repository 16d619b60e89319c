"""Exact field arithmetic: prime fields F_p and the rationals.

Scalars are plain python objects: ints in [0, p) for F_p, Fraction for QQ.
A Field instance bundles the operations so the rest of the library never
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """F_p for prime p, or the rationals when p is None."""

    __slots__ = ("p",)

    def __init__(self, p: int | None):
        if p is not None and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def is_modular(self) -> bool:
        return self.p is not None

    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def of_int(self, n: int):
        return n % self.p if self.p is not None else Fraction(n)

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if self.p is not None:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def parse(self, s: str):
        if self.p is not None:
            return int(s) % self.p
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(s))

    def format(self, a) -> str:
        if self.p is not None:
            return str(a % self.p)
        f = Fraction(a)
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field(p={self.p})" if self.p is not None else "Field(QQ)"


QQ = Field(None)
