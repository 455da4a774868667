"""Binary quadratic forms and their class groups.

A form (a, b, c) stands for a*x^2 + b*x*y + c*y^2.  Proper equivalence is
tracked explicitly: reduction returns the SL2(Z) substitution it applied, so
callers can pull representations back through it.  For negative discriminant
every class has one reduced representative; for positive discriminant a class
is a cycle of reduced forms under the rho step, and the lexicographically
smallest member of the cycle is used as the canonical label.

Only fundamental discriminants are accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .errors import InternalCheckError
from .exact_algebra import FgAbelianGroup, abelian_structure
from .fields import is_fundamental_discriminant

Mat2 = tuple[tuple[int, int], tuple[int, int]]

_ID2: Mat2 = ((1, 0), (0, 1))
_SWAP: Mat2 = ((0, 1), (-1, 0))  # (x, y) -> (y, -x): (a,b,c) -> (c,-b,a)


def _mat_mul(m: Mat2, n: Mat2) -> Mat2:
    return (
        (
            m[0][0] * n[0][0] + m[0][1] * n[1][0],
            m[0][0] * n[0][1] + m[0][1] * n[1][1],
        ),
        (
            m[1][0] * n[0][0] + m[1][1] * n[1][0],
            m[1][0] * n[0][1] + m[1][1] * n[1][1],
        ),
    )


def _translation(m: int) -> Mat2:
    return ((1, m), (0, 1))


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def value(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c)

    def apply(self, m: Mat2) -> "QuadForm":
        """The form f((x,y) * m), i.e. substitute through m."""
        p, q = m[0][0], m[1][0]
        r, s = m[0][1], m[1][1]
        a2 = self.value(p, q)
        c2 = self.value(r, s)
        b2 = 2 * (self.a * p * r + self.c * q * s) + self.b * (p * s + q * r)
        return QuadForm(a2, b2, c2)

    def triple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def principal_form(disc: int) -> QuadForm:
    k = disc % 2
    return QuadForm(1, k, (k * k - disc) // 4)


def _check_disc(disc: int) -> None:
    if not is_fundamental_discriminant(disc):
        raise ValueError(f"not a fundamental discriminant: {disc}")


# -- negative discriminant -------------------------------------------------

def is_reduced_definite(f: QuadForm) -> bool:
    if abs(f.b) > f.a or f.a > f.c:
        return False
    if f.b < 0 and (abs(f.b) == f.a or f.a == f.c):
        return False
    return True


def _reduce_definite(f: QuadForm) -> tuple[QuadForm, Mat2]:
    if f.a <= 0 or f.disc >= 0:
        raise ValueError("positive definite forms only")
    m = _ID2
    g = f
    while not is_reduced_definite(g):
        if not (-g.a < g.b <= g.a):
            # translate b into (-a, a]
            t = (g.a - g.b) // (2 * g.a)
            step = _translation(t)
        elif g.a > g.c or (g.a == g.c and g.b < 0):
            step = _SWAP
        else:  # b == -a boundary
            step = _translation(1)
        g = g.apply(step)
        m = _mat_mul(m, step)
    return g, m


def enumerate_reduced_definite(disc: int) -> list[QuadForm]:
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (a == c or -b == a):
                continue
            f = QuadForm(a, b, c)
            if f.is_primitive():
                out.append(f)
        a += 1
    return sorted(out, key=QuadForm.triple)


# -- positive discriminant -------------------------------------------------

def is_reduced_indefinite(f: QuadForm) -> bool:
    d = f.disc
    s0 = isqrt(d)
    b = f.b
    if b < 1 or b > s0:
        return False
    ta = 2 * abs(f.a)
    return ta + b > s0 and ta - b <= s0


def _rho(f: QuadForm) -> tuple[QuadForm, Mat2]:
    """One reduction step: leading coefficient moves to c's slot."""
    d = f.disc
    s0 = isqrt(d)
    c = f.c
    if c == 0:
        raise ValueError("degenerate form")
    w = 2 * abs(c)
    # target window for the new middle coefficient
    hi = s0 if abs(c) <= s0 else abs(c)
    r = (-f.b) % w
    b2 = hi - ((hi - r) % w)
    t = (b2 + f.b) // (2 * c)
    step = _mat_mul(_SWAP, _translation(t))
    g = f.apply(step)
    if g.b != b2:
        raise InternalCheckError("rho step produced unexpected middle coefficient")
    return g, step


def _reduce_indefinite(f: QuadForm) -> tuple[QuadForm, Mat2]:
    g, m = f, _ID2
    for _ in range(64 + 4 * max(g.a.bit_length(), g.c.bit_length(), 1)):
        if is_reduced_indefinite(g):
            return g, m
        g, step = _rho(g)
        m = _mat_mul(m, step)
    raise InternalCheckError("reduction did not terminate")


def cycle_of(f: QuadForm) -> tuple[QuadForm, ...]:
    """The rho-cycle through a reduced indefinite form."""
    if not is_reduced_indefinite(f):
        raise ValueError("need a reduced form")
    out = [f]
    g, _ = _rho(f)
    while g != f:
        out.append(g)
        g, _ = _rho(g)
    return tuple(out)


def enumerate_reduced_indefinite(disc: int) -> list[QuadForm]:
    s0 = isqrt(disc)
    out = []
    for b in range(1, s0 + 1):
        if (b - disc) % 2:
            continue
        num = disc - b * b  # = -4ac > 0
        if num % 4:
            continue
        prod = num // 4  # = -a*c = |a|*|c|
        if prod == 0:
            continue
        a = 1
        while a * a <= prod:
            if prod % a == 0:
                for aa in {a, prod // a}:
                    ta = 2 * aa
                    if ta + b > s0 and ta - b <= s0:
                        for sign in (1, -1):
                            f = QuadForm(sign * aa, b, -sign * (prod // aa))
                            if f.is_primitive():
                                out.append(f)
            a += 1
    return sorted(set(out), key=QuadForm.triple)


# -- common interface -------------------------------------------------------

def reduce_form(f: QuadForm) -> tuple[QuadForm, Mat2]:
    """A reduced form properly equivalent to f plus the substitution used."""
    if f.disc < 0:
        if f.a < 0:
            raise ValueError("negative definite forms are not used here")
        return _reduce_definite(f)
    return _reduce_indefinite(f)


def solve_represents_one(f: QuadForm) -> tuple[int, int] | None:
    """Integers (x, y) with f(x, y) = 1, or None if 1 is not represented."""
    g, m = reduce_form(f)
    if f.disc < 0:
        if g.a == 1:
            return (m[0][0], m[1][0])
        return None
    start = g
    while True:
        if g.a == 1:
            return (m[0][0], m[1][0])
        g, step = _rho(g)
        m = _mat_mul(m, step)
        if g == start:
            return None


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _solve_linmod(a: int, b: int, m: int) -> tuple[int, int]:
    """Solutions of a*x = b (mod m), as x = u + v*Z.  m > 0 required."""
    g, d, _ = _egcd(a, m)
    if b % g:
        raise InternalCheckError("linear congruence from composition has no solution")
    u = (b // g) * d % m
    v = m // g
    return u, v


def compose_raw(f1: QuadForm, f2: QuadForm) -> QuadForm:
    """Gauss composition; both forms must share a discriminant and have a > 0."""
    if f1.disc != f2.disc:
        raise ValueError("discriminant mismatch")
    if f1.a <= 0 or f2.a <= 0:
        raise ValueError("composition wants positive leading coefficients")
    a, b, c = f1.triple()
    aa, bb, _ = f2.triple()
    g = (b + bb) // 2
    h = -(b - bb) // 2
    w = gcd(gcd(a, aa), g)
    s = a // w
    t = aa // w
    u = g // w
    mu, nu = _solve_linmod(t * u, h * u + s * c, s * t)
    lam = _solve_linmod(t * nu, h - t * mu, s)[0]
    k = mu + nu * lam
    ell = (k * t - h) // s
    m = (t * u * k - h * u - c * s) // (s * t)
    cap_a = s * t
    cap_b = w * u - (k * t + ell * s)
    cap_c = k * ell - w * m
    out = QuadForm(cap_a, cap_b, cap_c)
    if out.disc != f1.disc:
        raise InternalCheckError("composition changed the discriminant")
    return out


# -- class groups -----------------------------------------------------------

@dataclass(frozen=True)
class ClassGroupData:
    disc: int
    representatives: tuple[QuadForm, ...]
    group: FgAbelianGroup
    coords: tuple[tuple[int, ...], ...]  # per class, in group coordinates
    identity_index: int
    _index_of_reduced: dict
    _compose_rep: tuple[QuadForm, ...]  # positive-leading member per class

    def class_index(self, f: QuadForm) -> int:
        if f.disc != self.disc:
            raise ValueError("discriminant mismatch")
        if not f.is_primitive():
            raise ValueError("imprimitive form")
        g, _ = reduce_form(f)
        return self._index_of_reduced[g.triple()]

    def class_coords(self, f: QuadForm) -> tuple[int, ...]:
        return self.coords[self.class_index(f)]

    def compose_indices(self, i: int, j: int) -> int:
        prod = compose_raw(self._compose_rep[i], self._compose_rep[j])
        g, _ = reduce_form(prod)
        return self._index_of_reduced[g.triple()]

    def inverse_index(self, i: int) -> int:
        g, _ = reduce_form(self.representatives[i].inverse())
        return self._index_of_reduced[g.triple()]

    @property
    def h(self) -> int:
        return len(self.representatives)


@lru_cache(maxsize=None)
def class_group_data(disc: int) -> ClassGroupData:
    _check_disc(disc)
    index_of: dict[tuple[int, int, int], int] = {}
    if disc < 0:
        reps = enumerate_reduced_definite(disc)
        for i, f in enumerate(reps):
            index_of[f.triple()] = i
        comp_reps = list(reps)
    else:
        reduced = enumerate_reduced_indefinite(disc)
        seen: set[tuple[int, int, int]] = set()
        reps = []
        comp_reps = []
        for f in reduced:  # already sorted, so cycle minima come first
            if f.triple() in seen:
                continue
            cyc = cycle_of(f)
            idx = len(reps)
            reps.append(min(cyc, key=QuadForm.triple))
            comp_reps.append(next(g for g in cyc if g.a > 0))
            for g in cyc:
                if g.triple() in seen:
                    raise InternalCheckError("rho-cycles are not disjoint")
                seen.add(g.triple())
                index_of[g.triple()] = idx
        missing = [f for f in reduced if f.triple() not in seen]
        if missing:
            raise InternalCheckError("reduced form outside every cycle")
    reps = list(reps)
    pf, _ = reduce_form(principal_form(disc))
    identity = index_of[pf.triple()]

    table: dict[tuple[int, int], int] = {}

    def compose(i: int, j: int) -> int:
        key = (i, j) if i <= j else (j, i)
        got = table.get(key)
        if got is None:
            prod = compose_raw(comp_reps[i], comp_reps[j])
            g, _ = reduce_form(prod)
            got = index_of[g.triple()]
            table[key] = got
        return got

    group, coords, _ = abelian_structure(len(reps), compose, identity)
    return ClassGroupData(
        disc=disc,
        representatives=tuple(reps),
        group=group,
        coords=tuple(coords),
        identity_index=identity,
        _index_of_reduced=index_of,
        _compose_rep=tuple(comp_reps),
    )


def form_class_group(disc: int) -> tuple[FgAbelianGroup, tuple[QuadForm, ...]]:
    """The narrow class group of the given fundamental discriminant, with one
    canonical form representative per class."""
    data = class_group_data(disc)
    return data.group, data.representatives


# -- units of real quadratic orders ----------------------------------------

@lru_cache(maxsize=None)
def pell_automorph(disc: int) -> tuple[int, int, int]:
    """(t, u, sign): smallest t, u > 0 with t^2 - disc*u^2 = 4, and the norm
    sign of the fundamental unit (-1 iff some reduced principal-cycle form
    has leading coefficient -1)."""
    _check_disc(disc)
    if disc < 0:
        raise ValueError("real quadratic discriminants only")
    f0, _ = reduce_form(principal_form(disc))
    m = _ID2
    g, step = _rho(f0)
    m = _mat_mul(m, step)
    sign = 1
    while g != f0:
        if g.a == -1:
            sign = -1
        g, step = _rho(g)
        m = _mat_mul(m, step)
    t = abs(m[0][0] + m[1][1])
    u, rem = divmod(abs(m[1][0]), abs(f0.a))
    if rem:
        raise InternalCheckError("automorph corner entry not divisible by a")
    if t * t - disc * u * u != 4:
        raise InternalCheckError("cycle automorph is not a Pell solution")
    if u == 0:
        raise InternalCheckError("trivial automorph from a full cycle walk")
    return t, u, sign
