"""Finite window model of the primitive ideal space.

Points are labelled by a zero set S inside a prime window together with a
character of an isotropy approximant.  Everything here is finite-precision
by design: the true isotropy groups involve a closure in the finite ideles
that no terminating computation decides, so this module only ever reports
(precision, height)-approximants with a stabilization flag, never limits.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .angles import Angle
from .errors import PrecisionError
from .exact_algebra import Character, Lattice
from .fields import FieldSpec
from .ideal_lattices import (
    enumerate_primes,
    norm_map,
    window_ideals,
)
from .ideals import (
    QuadIdeal,
    QuadInt,
    fundamental_totally_positive_unit,
    totally_positive_generator,
)

TOTAL_POSITIVITY_SEARCH_DEPTH = 64


# -- support patterns and quasi-orbits -----------------------------------------

@dataclass(frozen=True)
class SupportPattern:
    """A window of primes and the subset where a point's component vanishes."""

    field: FieldSpec
    bound: int
    zero_set: frozenset[str]

    def __post_init__(self):
        labels = {rec.label for rec in self.window}
        stray = self.zero_set - labels
        if stray:
            raise ValueError(f"zero set labels {sorted(stray)} are outside the window")

    @property
    def window(self):
        return enumerate_primes(self.field, self.bound)


def support_pattern(field: FieldSpec, bound: int, zero_labels) -> SupportPattern:
    return SupportPattern(field, bound, frozenset(zero_labels))


def quasi_orbit(pattern: SupportPattern) -> frozenset[str]:
    """The zero set, which classifies the truncated orbit closure.

    Two patterns over the same window have equal truncated orbit closures
    exactly when these sets coincide; enlarging the window can split them.
    """
    return pattern.zero_set


# -- residue vectors and the orbit-closure solver ------------------------------

@dataclass(frozen=True)
class ResidueVector:
    """Residues modulo p^precision at each window prime p.

    Entries are (unit coefficient, omega coefficient) pairs; the omega
    coefficient is zero over the rationals.
    """

    field: FieldSpec
    primes: tuple[int, ...]
    precision: int
    residues: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be at least 1")
        if len(self.residues) != len(self.primes):
            raise ValueError("one residue per prime")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("window primes must be distinct")
        for p in self.primes:
            if p < 2 or any(p % q == 0 for q in range(2, min(p, 1000)) if q * q <= p):
                raise ValueError(f"{p} is not prime")
        for p, (u, v) in zip(self.primes, self.residues):
            q = p**self.precision
            if not (0 <= u < q and 0 <= v < q):
                raise ValueError(f"residue at {p} is not reduced modulo {q}")
            if self.field.kind == "rational" and v:
                raise ValueError("rational residues have no omega part")

    def modulus(self, i: int) -> int:
        return self.primes[i] ** self.precision


def residue_vector(field: FieldSpec, primes, precision: int, values) -> ResidueVector:
    """Build a ResidueVector from integers, (u, v) pairs, or quadratic integers."""
    primes = tuple(primes)
    values = list(values)
    if len(values) != len(primes):
        raise ValueError("one value per prime")
    out = []
    for p, val in zip(primes, values):
        q = p**precision
        if isinstance(val, QuadInt):
            u, v = val.u, val.v
        elif isinstance(val, tuple):
            u, v = val
        else:
            u, v = int(val), 0
        out.append((u % q, v % q))
    return ResidueVector(field, primes, precision, tuple(out))


def _residue_is_zero(vec: ResidueVector, i: int) -> bool:
    return vec.residues[i] == (0, 0)


def _residue_norm(field: FieldSpec, pair) -> int:
    if field.kind == "rational":
        return pair[0]
    return QuadInt(field.discriminant, pair[0], pair[1]).norm()


def _residue_mul(field: FieldSpec, a, b, q: int) -> tuple[int, int]:
    if field.kind == "rational":
        return ((a[0] * b[0]) % q, 0)
    d = field.discriminant
    z = QuadInt(d, a[0], a[1]) * QuadInt(d, b[0], b[1])
    return (z.u % q, z.v % q)


def _residue_inverse(field: FieldSpec, pair, q: int) -> tuple[int, int]:
    """Inverse via the conjugate over the norm; caller checks invertibility."""
    if field.kind == "rational":
        return (pow(pair[0], -1, q), 0)
    d = field.discriminant
    z = QuadInt(d, pair[0], pair[1])
    scale = pow(z.norm() % q, -1, q)
    zbar = z.conj()
    return ((zbar.u * scale) % q, (zbar.v * scale) % q)


def crt_orbit_solver(
    field: FieldSpec, rho: ResidueVector, sigma: ResidueVector
) -> QuadInt | None:
    """A totally positive integer lambda with lambda*rho = sigma at precision.

    Returns None when the support condition fails (rho vanishes at a prime
    where sigma does not): that failure is definitive, no precision will
    fix it.  A residue that is neither zero nor invertible cannot be
    decided at this precision and raises instead.
    """
    if field.kind == "table":
        raise ValueError("table fields carry no element arithmetic")
    if (rho.field, rho.primes, rho.precision) != (
        sigma.field,
        sigma.primes,
        sigma.precision,
    ):
        raise ValueError("residue vectors live over different windows")
    if not rho.primes:
        disc = 1 if field.kind == "rational" else field.discriminant
        return QuadInt(disc, 1, 0)
    targets = []
    for i, p in enumerate(rho.primes):
        q = rho.modulus(i)
        if _residue_is_zero(rho, i):
            if not _residue_is_zero(sigma, i):
                return None
            targets.append(None)  # unconstrained at this prime
            continue
        if _residue_norm(field, rho.residues[i]) % p == 0:
            raise PrecisionError(
                f"residue at {p} is a nonzero zero divisor; raise the precision"
            )
        inv = _residue_inverse(field, rho.residues[i], q)
        targets.append(_residue_mul(field, inv, sigma.residues[i], q))

    # coefficientwise CRT over the pairwise coprime moduli
    big = 1
    u = v = 0
    for i, t in enumerate(targets):
        if t is None:
            continue
        q = rho.modulus(i)
        if big == 1:
            u, v, big = t[0], t[1], q
            continue
        inv = pow(big % q, -1, q)
        u += big * ((inv * (t[0] - u)) % q)
        v += big * ((inv * (t[1] - v)) % q)
        big *= q
    if big == 1:
        big = rho.modulus(0)  # every prime unconstrained; any positive works

    lam = _make_totally_positive(field, u % big, v % big, big)
    _check_solution(field, lam, rho, sigma)
    return lam


def _make_totally_positive(field: FieldSpec, u: int, v: int, modulus: int) -> QuadInt:
    """Shift by multiples of the modulus until totally positive."""
    disc = 1 if field.kind == "rational" else field.discriminant
    for n in range(TOTAL_POSITIVITY_SEARCH_DEPTH + 1):
        z = QuadInt(disc, u + n * modulus, v)
        if z.is_totally_positive():
            return z
    raise PrecisionError("no totally positive lift within the search depth")


def _check_solution(field, lam: QuadInt, rho: ResidueVector, sigma: ResidueVector):
    pair = (lam.u, lam.v)
    for i in range(len(rho.primes)):
        q = rho.modulus(i)
        got = _residue_mul(field, (pair[0] % q, pair[1] % q), rho.residues[i], q)
        if got != sigma.residues[i]:
            raise PrecisionError("solver self-check failed")  # pragma: no cover


# -- isotropy approximants ------------------------------------------------------

@dataclass(frozen=True)
class GammaApproximant:
    """A finite stand-in for the isotropy group of a zero set.

    The lattice collects exponent vectors of ideals with a totally positive
    generator that is 1 modulo every off-S window prime power and whose
    support stays inside S.  It shrinks as precision grows and grows with
    the height bound; the flag only says the next precision step agrees,
    never that the limit has been reached.
    """

    field: FieldSpec
    bound: int
    zero_set: frozenset[str]
    precision: int
    height_bound: int
    lattice: Lattice
    stable: bool


def _unit_twists(disc: int) -> list[QuadInt]:
    """Generators' ambiguity for imaginary fields: the torsion units."""
    if disc == -3:
        seed = QuadInt(-3, 2, 1)  # primitive sixth root of unity
    elif disc == -4:
        seed = QuadInt(-4, 2, 1)  # fourth root
    else:
        seed = QuadInt(disc, -1, 0)
    units = []
    z = QuadInt(disc, 1, 0)
    while True:
        units.append(z)
        z = z * seed
        if z.u == 1 and z.v == 0:
            return units


def _reduce_mod_ideal(z: QuadInt, ideal: QuadIdeal) -> tuple[int, int]:
    """Canonical residue of z modulo the ideal's Hermite basis."""
    u, v = z.u, z.v
    q, v = divmod(v, ideal.s)
    u -= q * ideal.t
    return (u % ideal.a, v)


def _rational_gamma_rows(zero_primes, other_primes, k, height):
    modulus = 1
    for _, rec in other_primes:
        modulus *= rec.p**k
    found = []

    def walk(i, value, exponents):
        if i == len(zero_primes):
            if value > 1 and value % modulus == 1 % modulus:
                found.append(dict(exponents))
            return
        pos, rec = zero_primes[i]
        e = 0
        while value * rec.p**e <= height:
            if e:
                exponents[pos] = e
            walk(i + 1, value * rec.p**e, exponents)
            e += 1
        exponents.pop(pos, None)

    walk(0, 1, {})
    return found


def _quadratic_gamma_rows(field, bound, zero_primes, other_primes, k, height):
    ideals = window_ideals(field, bound)
    disc = field.discriminant
    if other_primes:
        modulus_ideal = QuadIdeal.unit_ideal(disc)
        for pos, _ in other_primes:
            modulus_ideal = modulus_ideal * ideals[pos] ** k
        one = _reduce_mod_ideal(QuadInt(disc, 1, 0), modulus_ideal)
    else:
        modulus_ideal = None
        one = None

    if disc < 0:
        twists = _unit_twists(disc)
    else:
        twists = None  # powers of the totally positive unit, walked lazily

    def congruent_to_one(z: QuadInt) -> bool:
        if modulus_ideal is None:
            return True
        if twists is not None:
            return any(
                _reduce_mod_ideal(z * u, modulus_ideal) == one for u in twists
            )
        eps = fundamental_totally_positive_unit(disc)
        seen = set()
        zc = z
        while True:
            r = _reduce_mod_ideal(zc, modulus_ideal)
            if r == one:
                return True
            if r in seen:
                return False
            seen.add(r)
            zc = QuadInt(disc, r[0], r[1]) * eps

    found = []

    def walk(i, norm, ideal, exponents):
        if i == len(zero_primes):
            if norm == 1:
                return
            gen = totally_positive_generator(ideal)
            if gen is not None and congruent_to_one(gen):
                found.append(dict(exponents))
            return
        pos, rec = zero_primes[i]
        step = ideals[pos]
        e = 0
        acc = ideal
        while norm * rec.norm_int**e <= height:
            if e:
                exponents[pos] = e
            walk(i + 1, norm * rec.norm_int**e, acc, exponents)
            acc = acc * step
            e += 1
        exponents.pop(pos, None)

    walk(0, 1, QuadIdeal.unit_ideal(disc), {})
    return found


def _gamma_lattice(field, bound, zero_set, precision, height_bound) -> Lattice:
    window = enumerate_primes(field, bound)
    zero_primes = [(i, r) for i, r in enumerate(window) if r.label in zero_set]
    other_primes = [(i, r) for i, r in enumerate(window) if r.label not in zero_set]
    if field.kind == "rational":
        rows = _rational_gamma_rows(zero_primes, other_primes, precision, height_bound)
    elif field.kind == "quadratic":
        rows = _quadratic_gamma_rows(
            field, bound, zero_primes, other_primes, precision, height_bound
        )
    else:
        raise ValueError("table fields carry no element arithmetic")
    m = len(window)
    dense = []
    for row in rows:
        vec = [0] * m
        for i, v in row.items():
            vec[i] = v
        dense.append(vec)
    return Lattice.from_generators(m, dense)


def gamma_S_approx(
    field: FieldSpec,
    zero_labels,
    bound: int,
    precision: int,
    height_bound: int,
) -> GammaApproximant:
    """The (precision, height)-approximant to the isotropy of a zero set.

    Smaller than the true group in the height direction and larger in the
    precision direction; no finite run can certify the limit, so callers
    get the approximant plus a flag saying whether one more precision step
    changes anything.
    """
    zero_set = frozenset(zero_labels)
    SupportPattern(field, bound, zero_set)  # validates labels
    lat = _gamma_lattice(field, bound, zero_set, precision, height_bound)
    nxt = _gamma_lattice(field, bound, zero_set, precision + 1, height_bound)
    return GammaApproximant(
        field=field,
        bound=bound,
        zero_set=zero_set,
        precision=precision,
        height_bound=height_bound,
        lattice=lat,
        stable=lat == nxt,
    )


# -- the power-cofinite topology -----------------------------------------------

SEPARATED = "separated"
EQUAL = "equal"
FIRST_SPECIALIZES = "first_specializes_to_second"
SECOND_SPECIALIZES = "second_specializes_to_first"


@dataclass(frozen=True)
class SeparationVerdict:
    kind: str
    witness: frozenset[str] | None

    def __str__(self) -> str:
        if self.kind == SEPARATED:
            return f"separated by the basic open set avoiding {sorted(self.witness)}"
        return self.kind.replace("_", " ")


def separation_relation(first, second) -> SeparationVerdict:
    """How two zero sets sit in the power-cofinite topology.

    Incomparable sets are separated: the basic open set of supports
    avoiding a finite witness G inside first - second contains the second
    point but not the first.  Nested sets cannot be separated; the smaller
    one lies in every open set around the larger.
    """
    a, b = frozenset(first), frozenset(second)
    if a == b:
        return SeparationVerdict(EQUAL, None)
    if a < b:
        return SeparationVerdict(FIRST_SPECIALIZES, None)
    if b < a:
        return SeparationVerdict(SECOND_SPECIALIZES, None)
    return SeparationVerdict(SEPARATED, frozenset(a - b))


# -- points and the flow --------------------------------------------------------

@dataclass(frozen=True)
class PrimPoint:
    """A zero set together with a character of its isotropy approximant."""

    approximant: GammaApproximant
    character: Character

    def __post_init__(self):
        if len(self.character.angles) != self.approximant.lattice.rank:
            raise ValueError(
                "character must give one angle per approximant basis vector"
            )

    @property
    def zero_set(self) -> frozenset[str]:
        return self.approximant.zero_set


def generator_norms(approximant: GammaApproximant):
    """Norms of the approximant's basis vectors, in factored form."""
    return tuple(
        norm_map(approximant.field, row, approximant.bound)
        for row in approximant.lattice.basis.entries
    )


def flow_on_prim(point: PrimPoint, t: float) -> PrimPoint:
    """Rotate the character by the log-norm of each basis direction.

    The zero set never moves.  A point whose approximant is trivial is
    fixed for every t; otherwise any t != 0 moves the character.
    """
    if t == 0.0:
        return point
    shifted = tuple(
        angle + Angle.log_term(norm, t)
        for angle, norm in zip(point.character.angles, generator_norms(point.approximant))
    )
    return replace(point, character=Character(shifted))
