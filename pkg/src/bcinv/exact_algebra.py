"""Exact integer linear algebra: matrices, normal forms, lattices, quotients.

Everything here is pure integer arithmetic; no floats, no modular shortcuts,
no basis reduction.  Matrices act on row vectors from the right, so a
homomorphism Z^m -> Z^n is an m-by-n matrix F and the image of x is x*F.

>>> M = IntMatrix.from_rows([[2, 4], [6, 8]])
>>> smith_normal_form(M)[1].entries
((2, 0), (0, 4))
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .angles import Angle
from .errors import InternalCheckError


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple[tuple[int, ...], ...]
    rows: int
    cols: int

    def __init__(self, entries, rows=None, cols=None):
        ent = tuple(tuple(int(x) for x in row) for row in entries)
        r = len(ent) if rows is None else rows
        if ent:
            c = len(ent[0])
            if any(len(row) != c for row in ent):
                raise ValueError("ragged rows")
        else:
            if cols is None:
                raise ValueError("empty matrix needs an explicit column count")
            c = cols
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)

    @staticmethod
    def from_rows(rows, cols=None) -> "IntMatrix":
        return IntMatrix(rows, cols=cols)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(
            tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)),
            cols=n,
        )

    @staticmethod
    def zeros(r: int, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(0 for _ in range(c)) for _ in range(r)), cols=c)

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            tuple(self.column(j) for j in range(self.cols)), cols=self.rows
        )

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = other.transpose().entries
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                for row in self.entries
            ),
            cols=other.cols,
        )

    def apply(self, vec) -> tuple[int, ...]:
        """Image of a row vector: vec * self."""
        if len(vec) != self.rows:
            raise ValueError("shape mismatch")
        out = [0] * self.cols
        for x, row in zip(vec, self.entries):
            if x:
                for j, a in enumerate(row):
                    out[j] += x * a
        return tuple(out)

    def is_unimodular(self) -> bool:
        if self.rows != self.cols:
            return False
        return hermite_normal_form(self) == IntMatrix.identity(self.rows)

    def inverse(self) -> "IntMatrix":
        """Exact inverse of a unimodular matrix."""
        n = self.rows
        if n != self.cols:
            raise ValueError("not square")
        aug = [
            [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(self.entries)
        ]
        for col in range(n):
            piv = next((i for i in range(col, n) if aug[i][col]), None)
            if piv is None:
                raise ValueError("singular matrix")
            aug[col], aug[piv] = aug[piv], aug[col]
            pv = aug[col][col]
            aug[col] = [x / pv for x in aug[col]]
            for i in range(n):
                if i != col and aug[i][col]:
                    f = aug[i][col]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        inv_rows = []
        for row in aug:
            vals = row[n:]
            if any(x.denominator != 1 for x in vals):
                raise ValueError("matrix is not unimodular")
            inv_rows.append([int(x) for x in vals])
        return IntMatrix(inv_rows, cols=n)


def _hnf_rows_transform(matrix: IntMatrix):
    """Row Hermite form with transform.

    Returns (rows, U, pivots) where U * matrix has the returned rows, the
    first len(pivots) rows are the echelon rows (positive pivots, entries
    above each pivot reduced into [0, pivot)), and the rest are zero.
    """
    r, c = matrix.rows, matrix.cols
    a = [list(row) for row in matrix.entries]
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    top = 0
    pivots = []
    for col in range(c):
        while True:
            nz = [i for i in range(top, r) if a[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][col]))
            if i0 != top:
                a[top], a[i0] = a[i0], a[top]
                u[top], u[i0] = u[i0], u[top]
            if a[top][col] < 0:
                a[top] = [-x for x in a[top]]
                u[top] = [-x for x in u[top]]
            clean = True
            p = a[top][col]
            for i in range(top + 1, r):
                q = a[i][col] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[top])]
                if a[i][col]:
                    clean = False
            if clean:
                break
        if top < r and a[top][col]:
            p = a[top][col]
            for i in range(top):
                q = a[i][col] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[top])]
            pivots.append((top, col))
            top += 1
            if top == r:
                break
    return a, u, pivots


def hermite_normal_form(matrix: IntMatrix) -> IntMatrix:
    """Canonical row Hermite form, zero rows dropped.

    Two integer matrices span the same row lattice iff their Hermite forms
    are equal.
    """
    rows, _, pivots = _hnf_rows_transform(matrix)
    return IntMatrix(rows[: len(pivots)], cols=matrix.cols)


def smith_normal_form(matrix: IntMatrix):
    """Diagonalize over Z: returns (U, D, V) with U*matrix*V == D.

    U and V are unimodular; D is rectangular-diagonal with nonnegative
    entries forming a divisibility chain d1 | d2 | ...  The pivot chosen at
    each step is a smallest-magnitude nonzero entry of the remaining block,
    first such entry in row-major order.
    """
    r, c = matrix.rows, matrix.cols
    a = [list(row) for row in matrix.entries]
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    v = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] and (best is None or abs(a[i][j]) < best[0]):
                    best = (abs(a[i][j]), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    addmul_row(i, t, a[i][t] // p)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, c):
                if a[t][j]:
                    addmul_col(j, t, a[t][j] // p)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            # row and column are clear; enforce divisibility of the rest
            p = a[t][t]
            offender = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if a[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            addmul_row(t, offender, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    d = [[a[i][j] if i == j else 0 for j in range(c)] for i in range(r)]
    return (
        IntMatrix(u, cols=r),
        IntMatrix(d, cols=c),
        IntMatrix(v, cols=c),
    )


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^n, held by its canonical Hermite basis."""

    ambient_rank: int
    basis: IntMatrix

    @staticmethod
    def from_generators(ambient_rank: int, rows) -> "Lattice":
        mat = IntMatrix(tuple(rows), cols=ambient_rank)
        if mat.cols != ambient_rank:
            raise ValueError("generator length != ambient rank")
        return Lattice(ambient_rank, hermite_normal_form(mat))

    @staticmethod
    def zero(ambient_rank: int) -> "Lattice":
        return Lattice(ambient_rank, IntMatrix((), cols=ambient_rank))

    @staticmethod
    def full(ambient_rank: int) -> "Lattice":
        return Lattice(ambient_rank, IntMatrix.identity(ambient_rank))

    @property
    def rank(self) -> int:
        return self.basis.rows

    def coords_of(self, vec):
        """Coefficients of vec over the basis rows, or None if outside."""
        v = list(vec)
        if len(v) != self.ambient_rank:
            raise ValueError("wrong length")
        coeffs = []
        for row in self.basis.entries:
            col = next(j for j, x in enumerate(row) if x)
            q, rem = divmod(v[col], row[col])
            if rem:
                return None
            coeffs.append(q)
            if q:
                v = [x - q * y for x, y in zip(v, row)]
        return tuple(coeffs) if not any(v) else None

    def contains(self, vec) -> bool:
        return self.coords_of(vec) is not None

    def is_sublattice_of(self, other: "Lattice") -> bool:
        return all(other.contains(row) for row in self.basis.entries)

    def sum_with(self, other: "Lattice") -> "Lattice":
        if self.ambient_rank != other.ambient_rank:
            raise ValueError("ambient mismatch")
        return Lattice.from_generators(
            self.ambient_rank, self.basis.entries + other.basis.entries
        )

    def index_in_ambient(self):
        """[Z^n : L] when L has full rank, else None."""
        if self.rank != self.ambient_rank:
            return None
        idx = 1
        for i, row in enumerate(self.basis.entries):
            idx *= row[i] if row[i] else 0
        return idx


@dataclass(frozen=True)
class FgAbelianGroup:
    """Finitely generated abelian group presented as Z^n / relations.

    invariant_factors lists the finite cyclic factors in divisibility order
    (each > 1) followed by one 0 per free factor.  Elements are coordinate
    tuples of the same length; the i-th coordinate lives mod d_i when d_i > 0
    and in Z when d_i == 0.
    """

    invariant_factors: tuple[int, ...]
    ambient_rank: int
    generator_lifts: IntMatrix
    _coord_map: IntMatrix  # ambient row vector -> raw coordinates

    def order(self):
        n = 1
        for d in self.invariant_factors:
            if d == 0:
                return None
            n *= d
        return n

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == 0)

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def project(self, vec) -> tuple[int, ...]:
        raw = self._coord_map.apply(vec)
        return tuple(
            x % d if d else x for x, d in zip(raw, self.invariant_factors)
        )

    def reduce(self, coords) -> tuple[int, ...]:
        return tuple(
            x % d if d else x for x, d in zip(coords, self.invariant_factors)
        )

    def add(self, a, b) -> tuple[int, ...]:
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a) -> tuple[int, ...]:
        return self.reduce(-x for x in a)

    def zero_element(self) -> tuple[int, ...]:
        return (0,) * len(self.invariant_factors)

    def element_order(self, coords):
        n = 1
        for x, d in zip(coords, self.invariant_factors):
            if d == 0:
                if x:
                    return None
                continue
            from math import gcd, lcm

            n = lcm(n, d // gcd(d, x % d))
        return n

    def elements(self):
        """All elements of a finite group, lexicographic in coordinates."""
        if not self.is_finite():
            raise ValueError("infinite group")
        return [
            tuple(t)
            for t in itertools.product(*(range(d) for d in self.invariant_factors))
        ]


def quotient_group(ambient_rank: int, sub: Lattice) -> FgAbelianGroup:
    """Structure of Z^ambient_rank / sub as invariant factors plus maps."""
    if sub.ambient_rank != ambient_rank:
        raise ValueError("ambient mismatch")
    n = ambient_rank
    if n == 0:
        empty = IntMatrix((), cols=0)
        return FgAbelianGroup((), 0, empty, empty)
    _, diag, v = smith_normal_form(sub.basis)
    rank = sub.rank
    dvals = [
        diag.entries[i][i] if i < min(rank, n) else 0 for i in range(n)
    ]
    kept = [i for i, d in enumerate(dvals) if d != 1]
    factors = tuple(dvals[i] for i in kept)
    vinv = v.inverse()
    lifts = IntMatrix([vinv.entries[i] for i in kept], cols=n)
    coord_map = IntMatrix(
        [[v.entries[i][j] for j in kept] for i in range(n)], cols=len(kept)
    )
    group = FgAbelianGroup(factors, n, lifts, coord_map)
    for idx, lift in enumerate(lifts.entries):
        got = group.project(lift)
        expect = tuple(1 if k == idx else 0 for k in range(len(factors)))
        if got != group.reduce(expect):
            raise InternalCheckError("generator lift does not project to e_i")
    return group


@dataclass(frozen=True)
class Character:
    """A homomorphism from coordinate tuples to the circle group."""

    angles: tuple[Angle, ...]

    def pair(self, vec) -> Angle:
        total = Angle.zero()
        for x, ang in zip(vec, self.angles):
            if x:
                total = total + ang.scale(x)
        return total

    def value(self, vec) -> complex:
        return self.pair(vec).to_complex()

    def is_trivial(self) -> bool:
        return all(a.is_trivial() for a in self.angles)

    def __mul__(self, other: "Character") -> "Character":
        return Character(tuple(a + b for a, b in zip(self.angles, other.angles)))

    def inverse(self) -> "Character":
        return Character(tuple(-a for a in self.angles))


def characters_of(group: FgAbelianGroup) -> tuple[Character, ...]:
    """All characters of a finite group; rejects infinite input."""
    if not group.is_finite():
        raise ValueError("character enumeration needs a finite group")
    ranges = [range(d) for d in group.invariant_factors]
    chars = []
    for combo in itertools.product(*ranges):
        chars.append(
            Character(
                tuple(
                    Angle.rational(Fraction(a, d))
                    for a, d in zip(combo, group.invariant_factors)
                )
            )
        )
    return tuple(chars)


def kernel_and_section(f: IntMatrix):
    """Kernel lattice and a section of a homomorphism x -> x*f.

    Returns (ker, section).  ker is the full kernel sublattice of the
    domain.  section maps image coordinates (over the Hermite basis of the
    image) back into the domain: section * f equals that Hermite basis.
    """
    rows, u, pivots = _hnf_rows_transform(f)
    s = len(pivots)
    ker = Lattice.from_generators(f.rows, [tuple(u[i]) for i in range(s, f.rows)])
    section = IntMatrix([u[i] for i in range(s)], cols=f.rows)
    return ker, section


def image_lattice(f: IntMatrix) -> Lattice:
    return Lattice(f.cols, hermite_normal_form(f))


def abelian_structure(size: int, compose, identity: int):
    """Invariant factors of a finite abelian group given by a composition law.

    Elements are the integers 0..size-1, ``compose(x, y)`` is the product and
    ``identity`` the neutral index.  Returns (group, coords, generators):
    coords[x] is the coordinate tuple of element x in the returned group and
    generators the indices of the elements used as generators.
    """
    gens: list[int] = []
    reachable = {identity}
    for x in range(size):
        if x in reachable:
            continue
        gens.append(x)
        seen = {identity}
        queue = [identity]
        while queue:
            y = queue.pop()
            for g in gens:
                z = compose(y, g)
                if z not in seen:
                    seen.add(z)
                    queue.append(z)
        reachable = seen
    k = len(gens)
    if k == 0:
        group = quotient_group(0, Lattice.zero(0))
        return group, [() for _ in range(size)], []
    rep: dict[int, tuple[int, ...]] = {identity: (0,) * k}
    relations: set[tuple[int, ...]] = set()
    queue = [identity]
    while queue:
        x = queue.pop()
        for j, g in enumerate(gens):
            y = compose(x, g)
            cand = tuple(
                c + (1 if idx == j else 0) for idx, c in enumerate(rep[x])
            )
            if y in rep:
                rel = tuple(a - b for a, b in zip(cand, rep[y]))
                if any(rel):
                    relations.add(rel)
            else:
                rep[y] = cand
                queue.append(y)
    if len(rep) != size:
        raise InternalCheckError("composition law does not act transitively")
    group = quotient_group(k, Lattice.from_generators(k, sorted(relations)))
    if group.order() != size:
        raise InternalCheckError("structure extraction lost elements")
    coords = [group.project(rep[x]) for x in range(size)]
    return group, coords, gens
