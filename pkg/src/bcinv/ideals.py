"""Integers and ideals of quadratic fields.

Elements are written over the basis (1, w) where w = (D + sqrt(D))/2 for the
fundamental discriminant D, so w*w = D*w - (D*D - D)/4.  An ideal is stored
as the canonical Hermite basis of its rank-2 lattice in coordinates
(coefficient of w, coefficient of 1); that puts it in the classical shape

    [[S, T], [0, A]]   i.e.  ideal = Z*(T + S*w) + Z*A

with S | A, S | T and norm S*A.  The attached binary quadratic form is
N(x*(T + S*w) + y*A) / (S*A), always built from the Hermite basis in this
orientation, which makes the ideal-class -> form-class dictionary a group
homomorphism rather than one defined only up to inversion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import InternalCheckError
from .exact_algebra import IntMatrix, hermite_normal_form
from .fields import FieldSpec, kronecker_symbol, sqrt_mod_prime
from .forms import QuadForm, pell_automorph, solve_represents_one


@dataclass(frozen=True)
class QuadInt:
    """u + v*w in the maximal order of discriminant disc."""

    disc: int
    u: int
    v: int

    def _n_omega(self) -> int:
        d = self.disc
        return (d * d - d) // 4

    def __add__(self, o: "QuadInt") -> "QuadInt":
        return QuadInt(self.disc, self.u + o.u, self.v + o.v)

    def __sub__(self, o: "QuadInt") -> "QuadInt":
        return QuadInt(self.disc, self.u - o.u, self.v - o.v)

    def __neg__(self) -> "QuadInt":
        return QuadInt(self.disc, -self.u, -self.v)

    def __mul__(self, o):
        if isinstance(o, int):
            return QuadInt(self.disc, self.u * o, self.v * o)
        if self.disc != o.disc:
            raise ValueError("mixed fields")
        d = self.disc
        u1, v1, u2, v2 = self.u, self.v, o.u, o.v
        return QuadInt(
            d,
            u1 * u2 - v1 * v2 * self._n_omega(),
            u1 * v2 + u2 * v1 + v1 * v2 * d,
        )

    __rmul__ = __mul__

    def conj(self) -> "QuadInt":
        return QuadInt(self.disc, self.u + self.v * self.disc, -self.v)

    def norm(self) -> int:
        return self.u * self.u + self.u * self.v * self.disc + self.v * self.v * self._n_omega()

    def trace(self) -> int:
        return 2 * self.u + self.v * self.disc

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def is_totally_positive(self) -> bool:
        """Positive under every real embedding; for D < 0 just nonzero."""
        if self.is_zero():
            return False
        if self.disc < 0:
            return True
        return self.norm() > 0 and self.trace() > 0

    def times_omega(self) -> "QuadInt":
        d = self.disc
        # (u + v*w) * w = -v*n(w) + (u + v*d)*w
        return QuadInt(d, -self.v * self._n_omega(), self.u + self.v * d)

    def as_pair(self) -> tuple[int, int]:
        """(coefficient of w, coefficient of 1), the lattice coordinate order."""
        return (self.v, self.u)

    def __str__(self) -> str:
        return f"{self.u}{self.v:+d}w"


def quadint_from_pair(disc: int, pair) -> QuadInt:
    return QuadInt(disc, pair[1], pair[0])


@dataclass(frozen=True)
class QuadIdeal:
    """A nonzero integral ideal, held by its canonical Hermite basis."""

    disc: int
    s: int
    t: int
    a: int  # basis: T + S*w and A, with S | T normalized via Hermite form

    @staticmethod
    def from_rows(disc: int, rows) -> "QuadIdeal":
        h = hermite_normal_form(IntMatrix(rows, cols=2))
        if h.rows != 2:
            raise ValueError("not a full-rank lattice")
        (s, t), (z, a) = h.entries
        if z != 0:
            raise InternalCheckError("Hermite basis of an ideal must be triangular")
        return QuadIdeal(disc, s, t, a)

    @staticmethod
    def from_elements(disc: int, elements) -> "QuadIdeal":
        """The ideal generated by the given elements of the maximal order."""
        rows = []
        for z in elements:
            rows.append(z.as_pair())
            rows.append(z.times_omega().as_pair())
        return QuadIdeal.from_rows(disc, rows)

    @staticmethod
    def unit_ideal(disc: int) -> "QuadIdeal":
        return QuadIdeal(disc, 1, 0, 1)

    def basis_elements(self) -> tuple[QuadInt, QuadInt]:
        return (QuadInt(self.disc, self.t, self.s), QuadInt(self.disc, self.a, 0))

    def norm(self) -> int:
        return self.s * self.a

    def contains(self, z: QuadInt) -> bool:
        v, rem = divmod(z.v, self.s)
        if rem:
            return False
        return (z.u - v * self.t) % self.a == 0

    def __mul__(self, o: "QuadIdeal") -> "QuadIdeal":
        if self.disc != o.disc:
            raise ValueError("mixed fields")
        rows = []
        for x in self.basis_elements():
            for y in o.basis_elements():
                rows.append((x * y).as_pair())
        return QuadIdeal.from_rows(self.disc, rows)

    def __pow__(self, k: int) -> "QuadIdeal":
        if k < 0:
            raise ValueError("integral ideals only")
        out = QuadIdeal.unit_ideal(self.disc)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "QuadIdeal":
        rows = [z.conj().as_pair() for z in self.basis_elements()]
        rows += [z.conj().times_omega().as_pair() for z in self.basis_elements()]
        return QuadIdeal.from_rows(self.disc, rows)

    def scaled(self, n: int) -> "QuadIdeal":
        return QuadIdeal(self.disc, self.s * n, self.t * n, self.a * n)

    def form(self) -> QuadForm:
        """The quadratic form attached to the Hermite basis."""
        g1 = QuadInt(self.disc, self.t, self.s)
        n = self.norm()
        a, rem_a = divmod(g1.norm(), n)
        b, rem_b = divmod(2 * self.t + self.s * self.disc, self.s)
        c, rem_c = divmod(self.a, self.s)
        if rem_a or rem_b or rem_c:
            raise InternalCheckError("ideal basis is not form-admissible")
        f = QuadForm(a, b, c)
        if f.disc != self.disc:
            raise InternalCheckError("attached form has wrong discriminant")
        g = gcd(gcd(a, b), c)
        if g != 1:
            raise InternalCheckError("attached form is imprimitive")
        return f


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    e: int
    f: int
    ideal: QuadIdeal

    @property
    def norm_int(self) -> int:
        return self.p**self.f

    def inverse_parts(self) -> tuple[QuadIdeal, int]:
        """(integral ideal, denominator): the fractional inverse is ideal/denom."""
        return self.ideal.conj(), self.p**self.f


@lru_cache(maxsize=None)
def primes_above(disc: int, p: int) -> tuple[PrimeIdeal, ...]:
    """The prime ideals of the maximal order over the rational prime p.

    A split pair is returned in a deterministic order fixed elsewhere (the
    caller sorts by attached class); here the smaller root comes first.
    """
    chi = kronecker_symbol(disc, p)
    n_omega = (disc * disc - disc) // 4
    if chi == -1:
        ideal = QuadIdeal(disc, p, 0, p)
        return (PrimeIdeal(p, 1, 2, ideal),)
    # roots of x^2 - disc*x + n_omega mod p
    if p == 2:
        roots = sorted({r for r in (0, 1) if (r * r - disc * r + n_omega) % 2 == 0})
    else:
        s = sqrt_mod_prime(disc % p, p)
        if s is None:
            raise InternalCheckError("kronecker symbol disagrees with square root")
        inv2 = pow(2, -1, p)
        roots = sorted({(disc + s) * inv2 % p, (disc - s) * inv2 % p})
    out = []
    for r in roots:
        rows = [
            (0, p),
            (p, 0),
            (1, -r),
            QuadInt(disc, -r, 1).times_omega().as_pair(),
        ]
        ideal = QuadIdeal.from_rows(disc, rows)
        if ideal.norm() != p:
            raise InternalCheckError("prime ideal has wrong norm")
        out.append(PrimeIdeal(p, 2 if chi == 0 else 1, 1, ideal))
    if chi == 0 and len(out) != 1:
        raise InternalCheckError("ramified prime must have a unique root")
    if chi == 1 and len(out) != 2:
        raise InternalCheckError("split prime must have two roots")
    return tuple(out)


def principal_ideal(z: QuadInt) -> QuadIdeal:
    return QuadIdeal.from_elements(z.disc, [z])


def valuation(ideal: QuadIdeal, prime: PrimeIdeal) -> int:
    """v_P(ideal) for an integral ideal, by iterated containment."""
    k = 0
    power = QuadIdeal.unit_ideal(ideal.disc)
    while True:
        power = power * prime.ideal
        g1, g2 = ideal.basis_elements()
        if power.contains(g1) and power.contains(g2):
            k += 1
        else:
            return k


@dataclass(frozen=True)
class GeneratorCertificate:
    """A totally positive generator z/denominator of a fractional ideal."""

    element: QuadInt
    denominator: int

    def describe(self) -> str:
        return f"({self.element})/{self.denominator}"


def ideal_content_core(ideal: QuadIdeal) -> tuple[int, QuadIdeal]:
    """Split off the largest rational factor: ideal = content * core."""
    content = gcd(gcd(ideal.s, ideal.t), ideal.a)
    core = QuadIdeal(
        ideal.disc, ideal.s // content, ideal.t // content, ideal.a // content
    )
    return content, core


def totally_positive_generator(ideal: QuadIdeal) -> QuadInt | None:
    """A totally positive z with (z) = ideal, or None.

    Pulled back through form reduction: the attached form represents 1 at
    some (x, y) exactly when such a generator exists, and the SL2 transform
    tracking recovers it.  Rational content is split off first since it is
    generated by a positive integer, which is already totally positive.
    """
    content, core = ideal_content_core(ideal)
    xy = solve_represents_one(core.form())
    if xy is None:
        return None
    g1, g2 = core.basis_elements()
    z = (g1 * xy[0] + g2 * xy[1]) * content
    if z.norm() != ideal.norm():
        raise InternalCheckError("generator norm mismatch")
    if ideal.disc > 0 and not z.is_totally_positive():
        z = -z
    if not z.is_totally_positive():
        raise InternalCheckError("pulled-back generator is not totally positive")
    if principal_ideal(z) != ideal:
        raise InternalCheckError("pulled-back element does not generate the ideal")
    return z


def fundamental_totally_positive_unit(disc: int) -> QuadInt:
    """The smallest totally positive unit > 1 of a real quadratic order."""
    t, u, _ = pell_automorph(disc)
    num = t - u * disc
    if num % 2:
        raise InternalCheckError("parity violation in unit coordinates")
    eps = QuadInt(disc, num // 2, u)
    if eps.norm() != 1 or not eps.is_totally_positive():
        raise InternalCheckError("automorph did not yield a totally positive unit")
    return eps


def unit_norm_sign(disc: int) -> int:
    """Norm of the fundamental unit: -1 or +1."""
    return pell_automorph(disc)[2]


def field_disc(field: FieldSpec) -> int:
    if field.kind != "quadratic":
        raise ValueError("quadratic fields only")
    return field.discriminant
