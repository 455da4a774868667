"""Base fields and elementary prime arithmetic.

Three kinds of base field are supported: the rationals, real or imaginary
quadratic fields given by a squarefree integer d, and "table" fields whose
arithmetic is ingested from a description file instead of computed.  A
:class:`FieldSpec` is frozen and hashable so it can key caches.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import isqrt

from .errors import IngestionError

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any bound used here."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(2, n + 1) if sieve[i]]


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer."""
    if n <= 0:
        raise ValueError("positive integers only")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    q = 5
    while q * q <= n:
        for p in (q, q + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        q += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(abs(n)).values())


def sqrt_mod_prime(a: int, p: int):
    """A square root of a mod p, or None if a is a non-residue.

    Tonelli-Shanks; p must be prime.
    """
    a %= p
    if p == 2 or a == 0:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p-1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def kronecker_symbol(disc: int, p: int) -> int:
    """The symbol (disc / p) for prime p: +1 split, -1 inert, 0 ramified."""
    if not is_prime(p):
        raise ValueError(f"modulus must be prime, got {p}")
    if p == 2:
        if disc % 2 == 0:
            return 0
        return 1 if disc % 8 in (1, 7) else -1
    r = pow(disc % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def fundamental_discriminant(d: int) -> int:
    if d in (0, 1):
        raise ValueError("d must define a quadratic field")
    if not is_squarefree(d):
        raise ValueError(f"d must be squarefree, got {d}")
    return d if d % 4 == 1 else 4 * d


def is_fundamental_discriminant(disc: int) -> bool:
    if disc == 1 or disc == 0:
        return False
    if disc % 4 == 1:
        return is_squarefree(disc)
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


@dataclass(frozen=True)
class TablePrime:
    p: int
    e: int
    f: int
    label: tuple[int, ...]


@dataclass(frozen=True)
class TableData:
    name: str
    degree: int
    group_factors: tuple[int, ...]
    primes: tuple[TablePrime, ...]
    relations: tuple[tuple[tuple[int, int, int], ...], ...]
    prime_bound: int
    provenance: str


@dataclass(frozen=True)
class FieldSpec:
    """Which base field we are working over."""

    kind: str  # "rational" | "quadratic" | "table"
    d: int | None = None
    table: TableData | None = None

    @staticmethod
    def rational() -> "FieldSpec":
        return FieldSpec("rational")

    @staticmethod
    def quadratic(d: int) -> "FieldSpec":
        fundamental_discriminant(d)  # validates
        return FieldSpec("quadratic", d=d)

    @staticmethod
    def from_discriminant(disc: int) -> "FieldSpec":
        if not is_fundamental_discriminant(disc):
            raise ValueError(f"not a fundamental discriminant: {disc}")
        return FieldSpec.quadratic(disc if disc % 4 == 1 else disc // 4)

    @staticmethod
    def from_table(table: TableData) -> "FieldSpec":
        return FieldSpec("table", table=table)

    @property
    def degree(self) -> int:
        if self.kind == "rational":
            return 1
        if self.kind == "quadratic":
            return 2
        return self.table.degree

    @property
    def discriminant(self) -> int | None:
        if self.kind == "rational":
            return 1
        if self.kind == "quadratic":
            return fundamental_discriminant(self.d)
        return None

    @property
    def canonical_id(self) -> str:
        if self.kind == "rational":
            return "q"
        if self.kind == "quadratic":
            return f"q{self.d}"
        digest = hashlib.sha256(repr(self.table).encode()).hexdigest()[:12]
        return f"table-{self.table.name}-{digest}"

    def describe(self) -> str:
        if self.kind == "rational":
            return "Q"
        if self.kind == "quadratic":
            return f"Q(sqrt({self.d}))"
        return f"table field {self.table.name!r} of degree {self.table.degree}"


def split_type(field: FieldSpec, p: int) -> str:
    """How the rational prime p decomposes: 'split', 'inert' or 'ramified'.

    Over Q every prime counts as split.  For table fields, any e > 1 means
    ramified, a single prime of full residue degree means inert, and
    everything else counts as split.
    """
    if not is_prime(p):
        raise ValueError(f"not a prime: {p}")
    if field.kind == "rational":
        return "split"
    if field.kind == "quadratic":
        chi = kronecker_symbol(field.discriminant, p)
        return {1: "split", -1: "inert", 0: "ramified"}[chi]
    entries = [t for t in field.table.primes if t.p == p]
    if not entries:
        raise IngestionError(f"table has no data for p={p}")
    if any(t.e > 1 for t in entries):
        return "ramified"
    if len(entries) == 1 and entries[0].f == field.table.degree:
        return "inert"
    return "split"


def splitting_profile(field: FieldSpec, p: int) -> tuple[tuple[int, int], ...]:
    """The multiset of (e, f) pairs over p, sorted."""
    if field.kind == "rational":
        return ((1, 1),)
    if field.kind == "quadratic":
        chi = kronecker_symbol(field.discriminant, p)
        if chi == 1:
            return ((1, 1), (1, 1))
        if chi == -1:
            return ((1, 2),)
        return ((2, 1),)
    entries = sorted((t.e, t.f) for t in field.table.primes if t.p == p)
    if not entries:
        raise IngestionError(f"table has no data for p={p}")
    return tuple(entries)
