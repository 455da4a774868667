"""Finite-dimensional models of the norm-flow system and induced Gram windows.

A stabilized window gives the narrow class group C as a concrete coset list.
Each character of the window acts on l2(C) by sending the generator of a
prime ideal to (character phase) times (permutation by the prime's class),
and functions on C to diagonal matrices.  Phases stay exact angle
expressions; floats appear only inside norm and eigenvalue checks.

Representations that live on infinite-index isotropy subgroups are handled
through Gram-matrix windows only: the rank of a finite Gram slice witnesses
dimension growth without ever materializing an operator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .angles import Angle
from .errors import IncompleteRepresentativesError, InternalCheckError, UnstabilizedBoundError
from .exact_algebra import Character, Lattice
from .fields import FieldSpec
from .ideal_lattices import PrimeIdealData, class_window, truncated_P1

COMMUTANT_TOL = 1e-9
PAIRING_TOL = 1e-9
INTERTWINER_TOL = 1e-8
PSD_FLOOR = -1e-10


def norm_character(field: FieldSpec, bound: int, t: float) -> Character:
    """The character scaling each prime's phase by its norm to the power it."""
    primes = class_window(field, bound).primes
    if t == 0.0:
        return Character(tuple(Angle.zero() for _ in primes))
    return Character(tuple(Angle.log_term(rec.norm, t) for rec in primes))


def trivial_character(field: FieldSpec, bound: int) -> Character:
    return norm_character(field, bound, 0.0)


def random_character(field: FieldSpec, bound: int, rng: random.Random) -> Character:
    """Uniform angles drawn as exact dyadic rationals."""
    primes = class_window(field, bound).primes
    denom = 1 << 40
    return Character(
        tuple(
            Angle.rational(Fraction(rng.randrange(denom), denom)) for _ in primes
        )
    )


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """Action of a window character on l2 of the narrow class group.

    The accumulated evolution time tau is kept separate from the base
    character so that evolving by t and then s lands on exactly the float
    t + s, making the one-parameter group law and the comparison with a
    directly built representation exact at the phase-bookkeeping level.
    """

    field: FieldSpec
    bound: int
    elements: tuple[tuple[int, ...], ...]  # basis order of l2(C)
    primes: tuple[PrimeIdealData, ...]
    base_phases: tuple[Angle, ...]  # one per window prime
    perms: tuple[tuple[int, ...], ...]  # one per window prime
    tau: float = 0.0

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def phase(self, i: int) -> Angle:
        base = self.base_phases[i]
        if self.tau == 0.0:
            return base
        return base + Angle.log_term(self.primes[i].norm, self.tau)

    def phases(self) -> tuple[Angle, ...]:
        return tuple(self.phase(i) for i in range(len(self.primes)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixRep):
            return NotImplemented
        return (
            self.field == other.field
            and self.bound == other.bound
            and self.elements == other.elements
            and self.perms == other.perms
            and self.phases() == other.phases()
        )

    def __hash__(self):
        return hash((self.field, self.bound, self.elements, self.perms, self.phases()))

    def matrix(self, i: int) -> np.ndarray:
        """The unitary image of the generator of window prime i."""
        h = self.dimension
        out = np.zeros((h, h), dtype=complex)
        c = self.phase(i).to_complex()
        for j, k in enumerate(self.perms[i]):
            out[k, j] = c
        return out

    def vector_image(self, exponents) -> tuple[Angle, tuple[int, ...]]:
        """(phase, permutation) of a window exponent vector."""
        if isinstance(exponents, dict):
            items = exponents.items()
        else:
            if len(exponents) != len(self.primes):
                raise ValueError("exponent vector does not match the window")
            items = [(i, v) for i, v in enumerate(exponents) if v]
        ang = Angle.zero()
        perm = list(range(self.dimension))
        for i, v in items:
            if not v:
                continue
            ang = ang + self.phase(i).scale(v)
            step = self.perms[i]
            if v < 0:
                inv = [0] * len(step)
                for a, b in enumerate(step):
                    inv[b] = a
                step = inv
            for _ in range(abs(v)):
                perm = [step[j] for j in perm]
        return ang, tuple(perm)

    def matrix_of_vector(self, exponents) -> np.ndarray:
        ang, perm = self.vector_image(exponents)
        h = self.dimension
        out = np.zeros((h, h), dtype=complex)
        c = ang.to_complex()
        for j, k in enumerate(perm):
            out[k, j] = c
        return out

    def diagonal(self, values) -> np.ndarray:
        """Image of a function on the class group, as a diagonal matrix."""
        vals = list(values)
        if len(vals) != self.dimension:
            raise ValueError("function must list one value per class")
        return np.diag(np.asarray(vals, dtype=complex))

    def element_matrix(self, terms) -> np.ndarray:
        """Image of a finite sum of (function, window exponent vector) pairs."""
        h = self.dimension
        out = np.zeros((h, h), dtype=complex)
        for values, exponents in terms:
            out += self.diagonal(values) @ self.matrix_of_vector(exponents)
        return out


def build_rho(field: FieldSpec, bound: int, character: Character) -> MatrixRep:
    """The finite-dimensional representation attached to a window character.

    Requires the window classes to generate the full narrow class group;
    smaller windows would silently model a proper quotient, so they are
    rejected outright.
    """
    win = class_window(field, bound)
    if not win.stabilized:
        raise UnstabilizedBoundError(
            f"classes of norm <= {bound} generate only {len(win.image_elements)} "
            f"of {win.group.order()} classes for {field.describe()}; raise the bound"
        )
    if len(character.angles) != win.m:
        raise ValueError(
            f"character has {len(character.angles)} angles for a window of {win.m} primes"
        )
    elements = win.image_elements
    perms = []
    for rec in win.primes:
        perm = tuple(
            win.element_position(win.group.add(el, rec.class_coords))
            for el in elements
        )
        perms.append(perm)
    return MatrixRep(
        field=field,
        bound=bound,
        elements=elements,
        primes=win.primes,
        base_phases=tuple(character.angles),
        perms=tuple(perms),
    )


def time_evolve(rep: MatrixRep, t: float) -> MatrixRep:
    """Shift every prime's phase by norm^(it), keeping permutations fixed."""
    return MatrixRep(
        field=rep.field,
        bound=rep.bound,
        elements=rep.elements,
        primes=rep.primes,
        base_phases=rep.base_phases,
        perms=rep.perms,
        tau=rep.tau + t,
    )


def check_irreducible(rep: MatrixRep) -> bool:
    """Trivial commutant test over the generators and all diagonal projections.

    Stacks X A - A X = 0 for every generator image and every coordinate
    projection into one linear system on X and counts its numerical
    nullspace; dimension one (the scalars) means irreducible.
    """
    h = rep.dimension
    mats = [rep.matrix(i) for i in range(len(rep.primes))]
    for k in range(h):
        proj = np.zeros((h, h), dtype=complex)
        proj[k, k] = 1.0
        mats.append(proj)
    blocks = []
    eye = np.eye(h)
    for a in mats:
        # row-major vectorization: vec(XA - AX) = (A^T (x) I - I (x) A) vec(X)
        blocks.append(np.kron(a.T, eye) - np.kron(eye, a))
    system = np.vstack(blocks)
    sv = np.linalg.svd(system, compute_uv=False)
    null_dim = int(np.sum(sv < COMMUTANT_TOL * max(1.0, sv[0])))
    null_dim += h * h - len(sv)  # svd lists min(m, n) values
    return null_dim == 1


def are_equivalent(rep_a: MatrixRep, rep_b: MatrixRep) -> bool:
    """Unitary equivalence, decided by pairing the phase ratio against P1.

    The two representations are equivalent exactly when the character
    quotient is trivial on every generator of the principal-direction
    lattice; an explicit diagonal intertwiner is available from
    find_intertwiner as an independent cross-check.
    """
    if rep_a.field != rep_b.field or rep_a.bound != rep_b.bound:
        raise ValueError("representations live over different windows")
    diff = [a - b for a, b in zip(rep_a.phases(), rep_b.phases())]
    p1 = truncated_P1(rep_a.field, rep_a.bound, certify=False)
    for i in range(p1.row_count()):
        total = Angle.zero()
        for j, v in p1.row_exponents(i).items():
            total = total + diff[j].scale(v)
        if not total.is_trivial(PAIRING_TOL):
            return False
    return True


def find_intertwiner(rep_a: MatrixRep, rep_b: MatrixRep) -> np.ndarray | None:
    """A diagonal unitary W with W rho_a(u) = rho_b(u) W, or None.

    Built by walking the class group from the identity coset: each prime
    step forces the next diagonal entry.  A closed walk whose forced value
    disagrees with the stored one beyond tolerance means no intertwiner
    exists.
    """
    if rep_a.field != rep_b.field or rep_a.bound != rep_b.bound:
        raise ValueError("representations live over different windows")
    if rep_a.perms != rep_b.perms or rep_a.elements != rep_b.elements:
        return None
    h = rep_a.dimension
    win = class_window(rep_a.field, rep_a.bound)
    start = win.element_position(win.group.zero_element())
    ratios = [
        (rep_b.phase(i) - rep_a.phase(i)).to_complex()
        for i in range(len(rep_a.primes))
    ]
    x: list[complex | None] = [None] * h
    x[start] = 1.0
    queue = [start]
    while queue:
        j = queue.pop()
        for i, ratio in enumerate(ratios):
            k = rep_a.perms[i][j]
            forced = x[j] * ratio
            if x[k] is None:
                x[k] = forced
                queue.append(k)
            elif abs(x[k] - forced) > INTERTWINER_TOL:
                return None
    if any(v is None for v in x):
        raise InternalCheckError("class group walk failed to reach every coset")
    w = np.diag(np.asarray(x, dtype=complex))
    for i in range(len(rep_a.primes)):
        a = rep_a.matrix(i)
        b = rep_b.matrix(i)
        if np.max(np.abs(w @ a - b @ w)) > INTERTWINER_TOL:
            return None
    return w


def joint_kernel_probe(
    field: FieldSpec,
    bound: int,
    terms,
    sample_count: int = 64,
    seed: int | None = None,
) -> bool:
    """Whether some sampled character represents the element nonzero.

    The element is a finite sum of (function on the class group, window
    exponent vector) pairs.  Characters are sampled with uniform exact
    angles; the probe reports whether any sample gives operator norm above
    1e-9.  A nonzero element fails only with negligible probability.
    """
    rng = random.Random(seed)
    terms = [(tuple(values), exponents) for values, exponents in terms]
    for _ in range(max(1, sample_count)):
        gamma = random_character(field, bound, rng)
        rep = build_rho(field, bound, gamma)
        mat = rep.element_matrix(terms)
        if np.linalg.norm(mat, 2) > 1e-9:
            return True
    return False


# -- induced Gram windows ------------------------------------------------------

@dataclass(frozen=True)
class GramModel:
    """A finite window of the induced inner product over an isotropy subgroup.

    Basis vectors are indexed by the window elements; the inner product of
    the vectors at s and t is the character's value at t - s when that
    difference lies in the subgroup, else zero (antilinear in the first
    slot).
    """

    ambient_rank: int
    window: tuple[tuple[int, ...], ...]
    subgroup: Lattice
    character: Character
    gram: tuple[tuple[complex, ...], ...]

    def matrix(self) -> np.ndarray:
        return np.asarray(self.gram, dtype=complex)

    def rank(self, tol: float = 1e-9) -> int:
        m = self.matrix()
        if m.size == 0:
            return 0
        eig = np.linalg.eigvalsh(m)
        scale = max(1.0, float(eig[-1]))
        return int(np.sum(eig > tol * scale))

    def coset_count(self) -> int:
        seen = []
        for s in self.window:
            if not any(
                self.subgroup.contains([a - b for a, b in zip(s, t)]) for t in seen
            ):
                seen.append(s)
        return len(seen)


def character_value_on(subgroup: Lattice, character: Character, vec) -> Angle | None:
    """The character's angle at vec, or None when vec is outside the subgroup."""
    coords = subgroup.coords_of(vec)
    if coords is None:
        return None
    return character.pair(coords)


def induced_gram(
    ambient_rank: int, subgroup: Lattice, character: Character, window
) -> GramModel:
    """Gram matrix of the window vectors in the induced inner product."""
    if subgroup.ambient_rank != ambient_rank:
        raise ValueError("subgroup does not live in the stated ambient rank")
    if len(character.angles) != subgroup.rank:
        raise ValueError("character must give one angle per subgroup basis vector")
    win = [tuple(int(x) for x in s) for s in window]
    for s in win:
        if len(s) != ambient_rank:
            raise ValueError("window element of wrong length")
    n = len(win)
    gram = [[0j] * n for _ in range(n)]
    for i, s in enumerate(win):
        for j, t in enumerate(win):
            ang = character_value_on(
                subgroup, character, [a - b for a, b in zip(t, s)]
            )
            gram[i][j] = ang.to_complex() if ang is not None else 0j
    model = GramModel(
        ambient_rank=ambient_rank,
        window=tuple(win),
        subgroup=subgroup,
        character=character,
        gram=tuple(tuple(row) for row in gram),
    )
    if n:
        m = model.matrix()
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise InternalCheckError("induced Gram matrix is not Hermitian")
        if float(np.linalg.eigvalsh(m)[0]) < PSD_FLOOR:
            raise InternalCheckError("induced Gram matrix is not positive semidefinite")
    return model


def _coset_base_point(subgroup: Lattice, vec) -> tuple[int, ...]:
    """Reduce vec into the fundamental domain of the subgroup's basis rows.

    Depends only on the coset of vec, and is 0 exactly on the subgroup.
    """
    v = [int(x) for x in vec]
    for row in subgroup.basis.entries:
        pivot = next((c for c, x in enumerate(row) if x), None)
        if pivot is None:
            continue
        q = v[pivot] // row[pivot]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def canonical_onb(model: GramModel, coset_reps) -> list[np.ndarray]:
    """Orthonormal vectors gamma(-s) xi_s, one per coset representative.

    Each representative s in the window contributes the coefficient vector
    supported at s, with coefficient the character at base(s) - s where
    base(s) is the canonical point of s's coset.  Replacing s by s + t for
    t in the subgroup changes the coefficient vector but not the vector of
    the induced space: the difference has Gram seminorm zero.  For s in
    the subgroup itself the coefficient is literally the character at -s.
    The representatives must cover every coset met by the window, once
    each.
    """
    reps = [tuple(int(x) for x in s) for s in coset_reps]
    pos = {}
    for s in reps:
        if s not in model.window:
            raise IncompleteRepresentativesError(
                f"representative {s} is outside the window"
            )
        pos[s] = model.window.index(s)
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            d = [x - y for x, y in zip(reps[b], reps[a])]
            if model.subgroup.contains(d):
                raise IncompleteRepresentativesError(
                    f"representatives {reps[a]} and {reps[b]} share a coset"
                )
    if len(reps) != model.coset_count():
        raise IncompleteRepresentativesError(
            f"{len(reps)} representatives for {model.coset_count()} cosets"
        )
    out = []
    n = len(model.window)
    for s in reps:
        base = _coset_base_point(model.subgroup, s)
        step = [b - a for a, b in zip(base, s)]  # in the subgroup
        ang = character_value_on(
            model.subgroup, model.character, [-x for x in step]
        )
        if ang is None:
            raise InternalCheckError("coset reduction left the subgroup")
        vec = np.zeros(n, dtype=complex)
        vec[pos[s]] = ang.to_complex()
        out.append(vec)
    return out


def unbounded_dimension_witness(
    field: FieldSpec, bound: int, prime_label: str, depth: int
) -> int:
    """Gram rank along powers of one prime, isotropy omitting that prime.

    Models the isotropy subgroup as the window sublattice spanned by every
    other prime, then measures the Gram rank of the window 0, p, 2p, ...,
    depth*p.  Distinct powers land in distinct cosets, so the rank is
    depth + 1: the induced space outgrows any finite dimension.
    """
    win = class_window(field, bound)
    labels = [rec.label for rec in win.primes]
    try:
        idx = labels.index(prime_label)
    except ValueError:
        raise ValueError(f"no prime labelled {prime_label} in this window") from None
    m = win.m
    basis = [
        tuple(1 if j == i else 0 for j in range(m)) for i in range(m) if i != idx
    ]
    subgroup = Lattice.from_generators(m, basis)
    character = Character(tuple(Angle.zero() for _ in range(subgroup.rank)))
    window = [
        tuple(k if j == idx else 0 for j in range(m)) for k in range(depth + 1)
    ]
    model = induced_gram(m, subgroup, character, window)
    rank = model.rank()
    if rank != depth + 1:
        raise InternalCheckError(
            f"powers of {prime_label} collapsed to rank {rank} at depth {depth}"
        )
    return rank
