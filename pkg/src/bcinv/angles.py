"""Exact circle angles with symbolic logarithm terms.

Phases in this package are elements of R/Z, written in "turns".  An
:class:`Angle` is a rational turn count plus a finite sum of terms

    multiplier * tau * log(base) / (2*pi)

where ``base`` is a positive rational kept in factored form, ``multiplier``
is an integer, and ``tau`` is a float time parameter.  The time parameter is
stored unevaluated, so evolving first by ``t`` and then by ``s`` produces the
same object, bit for bit, as evolving once by ``t + s``: both reduce to the
float ``t + s`` in the ``tau`` slot.  Integer multipliers scale exactly as
well.  Only :meth:`float_turns` ever rounds.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .factored import FactoredRational

# one term: (log base, time coefficient, integer multiplier)
LogTerm = tuple[FactoredRational, float, int]


def _normalize_terms(terms) -> tuple[LogTerm, ...]:
    acc: dict[tuple[FactoredRational, float], int] = {}
    for base, tau, mult in terms:
        if mult == 0 or tau == 0.0 or base.is_one():
            continue
        acc[(base, tau)] = acc.get((base, tau), 0) + mult
    kept = [(b, t, m) for (b, t), m in acc.items() if m]
    kept.sort(key=lambda term: (term[0].exponents, term[1]))
    return tuple(kept)


@dataclass(frozen=True)
class Angle:
    """An element of R/Z: rational part plus exact log terms."""

    rat: Fraction
    terms: tuple[LogTerm, ...]

    def __init__(self, rat=0, terms=()):
        object.__setattr__(self, "rat", Fraction(rat) % 1)
        object.__setattr__(self, "terms", _normalize_terms(terms))

    @staticmethod
    def zero() -> "Angle":
        return Angle(0)

    @staticmethod
    def rational(q) -> "Angle":
        return Angle(Fraction(q))

    @staticmethod
    def log_term(base: FactoredRational, tau: float, mult: int = 1) -> "Angle":
        return Angle(0, ((base, tau, mult),))

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.rat + other.rat, self.terms + other.terms)

    def __neg__(self) -> "Angle":
        return Angle(-self.rat, tuple((b, t, -m) for b, t, m in self.terms))

    def __sub__(self, other: "Angle") -> "Angle":
        return self + (-other)

    def scale(self, k: int) -> "Angle":
        """Multiply by an integer. Exact: only the multiplier slots change."""
        return Angle(k * self.rat, tuple((b, t, k * m) for b, t, m in self.terms))

    def is_pure_rational(self) -> bool:
        return not self.terms

    def float_turns(self) -> float:
        """Value in [0, 1) as a float.  The only lossy accessor."""
        x = float(self.rat) + math.fsum(
            m * t * b.log() / math.tau for b, t, m in self.terms
        )
        return x % 1.0

    def distance_to_zero(self) -> float:
        """Distance to the nearest integer, i.e. to 0 on the circle."""
        if self.is_pure_rational():
            frac = self.rat  # already reduced mod 1
            return float(min(frac, 1 - frac))
        x = self.float_turns()
        return min(x, 1.0 - x)

    def is_trivial(self, tol: float | None = None) -> bool:
        """Is this the zero angle?  Exact for pure rationals, else within tol."""
        if self.is_pure_rational():
            return self.rat == 0
        if tol is None:
            return not self.terms and self.rat == 0
        return self.distance_to_zero() <= tol

    def to_complex(self) -> complex:
        if self.is_pure_rational():
            # keep the familiar exact values on the axes
            q = self.rat
            if q.denominator in (1, 2, 4):
                return {0: 1, 1: 1j, 2: -1, 3: -1j}[int(4 * q) % 4]
        return cmath.exp(2j * math.pi * self.float_turns())

    def __str__(self) -> str:
        parts = []
        if self.rat or not self.terms:
            parts.append(str(self.rat))
        for b, t, m in self.terms:
            coeff = f"{m}*" if m != 1 else ""
            parts.append(f"{coeff}{t!r}*log({b})/2pi")
        return " + ".join(parts)
