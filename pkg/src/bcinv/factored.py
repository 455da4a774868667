"""Positive rationals kept in factored form.

A :class:`FactoredRational` is a finitely supported map ``prime -> exponent``
with integer (possibly negative) exponents, denoting ``prod p**e``.  Keeping
the factorization explicit is what lets norm computations stay exact: the
value ``2 * 5**-1`` is stored as ``{2: 1, 5: -1}`` rather than as ``0.4``.

>>> x = FactoredRational({2: 1, 5: -1})
>>> x.value()
Fraction(2, 5)
>>> (x * x.inverse()).is_one()
True
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class FactoredRational:
    """A positive rational number as a frozen prime-exponent table."""

    exponents: tuple[tuple[int, int], ...] = field(default=())

    def __init__(self, exps):
        # accept a dict or an iterable of (prime, exponent) pairs; drop zeros
        if isinstance(exps, dict):
            items = exps.items()
        else:
            items = exps
        table = {}
        for p, e in items:
            if p < 2:
                raise ValueError(f"not a prime base: {p}")
            if e:
                table[p] = table.get(p, 0) + e
        object.__setattr__(
            self, "exponents", tuple(sorted((p, e) for p, e in table.items() if e))
        )

    @staticmethod
    def one() -> "FactoredRational":
        return FactoredRational({})

    @staticmethod
    def from_integer(n: int) -> "FactoredRational":
        """Factor a positive integer by trial division."""
        if n <= 0:
            raise ValueError("positive integers only")
        exps = {}
        for p in (2, 3):
            while n % p == 0:
                exps[p] = exps.get(p, 0) + 1
                n //= p
        q = 5
        while q * q <= n:
            for p in (q, q + 2):
                while n % p == 0:
                    exps[p] = exps.get(p, 0) + 1
                    n //= p
            q += 6
        if n > 1:
            exps[n] = exps.get(n, 0) + 1
        return FactoredRational(exps)

    def exponent_of(self, p: int) -> int:
        for q, e in self.exponents:
            if q == p:
                return e
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.exponents)

    def is_one(self) -> bool:
        return not self.exponents

    def is_integral(self) -> bool:
        return all(e > 0 for _, e in self.exponents)

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        exps = dict(self.exponents)
        for p, e in other.exponents:
            exps[p] = exps.get(p, 0) + e
        return FactoredRational(exps)

    def inverse(self) -> "FactoredRational":
        return FactoredRational({p: -e for p, e in self.exponents})

    def __pow__(self, k: int) -> "FactoredRational":
        return FactoredRational({p: k * e for p, e in self.exponents})

    def value(self) -> Fraction:
        num = den = 1
        for p, e in self.exponents:
            if e > 0:
                num *= p**e
            else:
                den *= p**-e
        return Fraction(num, den)

    def log(self) -> float:
        return math.fsum(e * math.log(p) for p, e in self.exponents)

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        return "*".join(
            f"{p}" if e == 1 else f"{p}^{e}" for p, e in self.exponents
        )
