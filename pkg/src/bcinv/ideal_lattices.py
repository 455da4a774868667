"""Truncated ideal windows and the lattice of principal directions.

Fix a base field and a norm bound B.  The window is the list of prime ideals
of norm at most B; exponent vectors over the window form Z^m, the truncated
ideal group.  Inside it sits the sublattice of vectors whose ideal product is
generated by a totally positive element; its quotient is the truncated narrow
class group, which stabilizes to the full narrow class group once the window
classes generate everything.

Two computation routes coexist.  Small windows use dense kernel extraction,
giving the Hermite basis outright, and certify every basis vector by
exhibiting a generator.  Large windows (needed when deciding how a large
prime splits) keep a structured generating set instead: a dense block over
the pilot primes, plus one implicit row per remaining prime, namely the
prime plus a fixed pilot word inverting its class.  Rows of the second kind
share their tail classwise, so the lattice costs O(pilots^2 + h * pilots)
storage no matter how many primes the window holds, and certificates are
produced on demand rather than eagerly.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

from .errors import IngestionError, InternalCheckError, UnstabilizedBoundError
from .exact_algebra import (
    FgAbelianGroup,
    IntMatrix,
    Lattice,
    abelian_structure,
    hermite_normal_form,
    kernel_and_section,
    quotient_group,
)
from .factored import FactoredRational
from .fields import FieldSpec, primes_upto
from .forms import class_group_data
from .ideals import (
    GeneratorCertificate,
    QuadIdeal,
    QuadInt,
    primes_above,
    totally_positive_generator,
)

DENSE_WINDOW_LIMIT = 140
EAGER_CERTIFICATE_LIMIT = 400


@dataclass(frozen=True)
class PrimeIdealData:
    """One prime ideal of the window, with its class data attached.

    class_coords live in the presentation of the full narrow class group
    (the form class group for quadratic fields, the declared factors for
    table fields, the trivial group over Q).  class_index points into the
    form-class representatives and is -1 when no forms exist.
    """

    p: int
    e: int
    f: int
    label: str
    class_coords: tuple[int, ...]
    class_index: int
    root: int | None = None  # distinguishes a split pair; None otherwise

    @property
    def norm_int(self) -> int:
        return self.p**self.f

    @property
    def norm(self) -> FactoredRational:
        return FactoredRational({self.p: self.f})


def _trivial_group() -> FgAbelianGroup:
    return quotient_group(0, Lattice.zero(0))


def _declared_group(factors) -> FgAbelianGroup:
    factors = tuple(factors)
    if not factors:
        return _trivial_group()
    n = len(factors)
    rows = [tuple(d if j == i else 0 for j in range(n)) for i, d in enumerate(factors)]
    return quotient_group(n, Lattice.from_generators(n, rows))


def target_class_group(field: FieldSpec) -> FgAbelianGroup:
    """The full narrow class group the window classes live in."""
    if field.kind == "rational":
        return _trivial_group()
    if field.kind == "quadratic":
        return class_group_data(field.discriminant).group
    return _declared_group(field.table.group_factors)


@lru_cache(maxsize=None)
def _quadratic_prime_records(field: FieldSpec, bound: int):
    """PrimeIdealData of norm <= bound plus the matching QuadIdeal list."""
    disc = field.discriminant
    data = class_group_data(disc)
    recs: list[PrimeIdealData] = []
    ideals: list[QuadIdeal] = []
    for p in primes_upto(bound):
        prs = primes_above(disc, p)
        entries = []
        for pr in prs:
            if pr.norm_int > bound:
                continue
            idx = data.class_index(pr.ideal.form())
            root = (-pr.ideal.t) % p if len(prs) == 2 else None
            entries.append((idx, root, pr))
        if len(entries) == 2:
            # conjugate order: lexicographically smaller class form first
            entries.sort(key=lambda t: (data.representatives[t[0]].triple(), t[1]))
            suffixes = ("a", "b")
        else:
            suffixes = ("",) * len(entries)
        for (idx, root, pr), suf in zip(entries, suffixes):
            recs.append(
                PrimeIdealData(
                    p=pr.p,
                    e=pr.e,
                    f=pr.f,
                    label=f"{p}{suf}",
                    class_coords=data.coords[idx],
                    class_index=idx,
                    root=root,
                )
            )
            ideals.append(pr.ideal)
    order = sorted(
        range(len(recs)), key=lambda i: (recs[i].norm_int, recs[i].p, recs[i].label)
    )
    return tuple(recs[i] for i in order), tuple(ideals[i] for i in order)


def enumerate_primes(field: FieldSpec, bound: int) -> tuple[PrimeIdealData, ...]:
    """The window: prime ideals of norm <= bound in canonical order.

    Ordered by (norm, residue characteristic, label); a split pair gets
    labels like 7a/7b with the lexicographically smaller class form first.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    if field.kind == "rational":
        return tuple(
            PrimeIdealData(p=p, e=1, f=1, label=str(p), class_coords=(), class_index=0)
            for p in primes_upto(bound)
        )
    if field.kind == "quadratic":
        return _quadratic_prime_records(field, bound)[0]
    table = field.table
    if bound > table.prime_bound:
        raise IngestionError(
            f"table lists primes up to {table.prime_bound}; "
            f"a window of norm bound {bound} may need p={table.prime_bound + 1} and beyond"
        )
    ordered = sorted(table.primes, key=lambda t: (t.p, t.f, t.label))
    total: dict[int, int] = {}
    for tp in ordered:
        total[tp.p] = total.get(tp.p, 0) + 1
    out = []
    position: dict[int, int] = {}
    for tp in ordered:
        i = position.get(tp.p, 0)
        position[tp.p] = i + 1
        if tp.p**tp.f > bound:
            continue
        suffix = f".{i}" if total[tp.p] > 1 else ""
        out.append(
            PrimeIdealData(
                p=tp.p,
                e=tp.e,
                f=tp.f,
                label=f"{tp.p}{suffix}",
                class_coords=tp.label,
                class_index=-1,
            )
        )
    out.sort(key=lambda r: (r.norm_int, r.p, r.label))
    return tuple(out)


def window_ideals(field: FieldSpec, bound: int) -> tuple[QuadIdeal, ...]:
    if field.kind != "quadratic":
        raise ValueError("only quadratic windows carry ideals")
    return _quadratic_prime_records(field, bound)[1]


def _as_vector(exponents, m: int) -> list[int]:
    if isinstance(exponents, dict):
        vec = [0] * m
        for i, v in exponents.items():
            vec[i] = v
        return vec
    vec = list(exponents)
    if len(vec) != m:
        raise ValueError("exponent vector does not match the window")
    return vec


def norm_map(field: FieldSpec, exponents, bound: int) -> FactoredRational:
    """The norm of an exponent vector over the window, in factored form."""
    primes = enumerate_primes(field, bound)
    vec = _as_vector(exponents, len(primes))
    out = FactoredRational.one()
    for v, rec in zip(vec, primes):
        if v:
            out = out * (rec.norm**v)
    return out


def ideal_of_exponents(field: FieldSpec, exponents, bound: int):
    """(integral ideal, denominator) representing the fractional product."""
    ideals = window_ideals(field, bound)
    primes = enumerate_primes(field, bound)
    vec = _as_vector(exponents, len(primes))
    acc = QuadIdeal.unit_ideal(field.discriminant)
    denom = 1
    for v, ideal, rec in zip(vec, ideals, primes):
        if v > 0:
            acc = acc * ideal**v
        elif v < 0:
            acc = acc * ideal.conj() ** (-v)
            denom *= rec.norm_int ** (-v)
    return acc, denom


def is_totally_positive_principal(
    field: FieldSpec, exponents, bound: int
) -> GeneratorCertificate | None:
    """Certificate that the ideal product is narrowly principal, or None.

    The certificate's element over its denominator generates the fractional
    ideal and is totally positive.  Over Q the element is written in the
    degenerate order of discriminant 1, where u + v*w is the integer u + v.
    """
    primes = enumerate_primes(field, bound)
    vec = _as_vector(exponents, len(primes))
    if field.kind == "rational":
        num = den = 1
        for v, rec in zip(vec, primes):
            if v > 0:
                num *= rec.p**v
            elif v < 0:
                den *= rec.p ** (-v)
        return GeneratorCertificate(element=QuadInt(1, num, 0), denominator=den)
    if field.kind != "quadratic":
        raise ValueError("table fields carry no element arithmetic")
    ideal, denom = ideal_of_exponents(field, vec, bound)
    z = totally_positive_generator(ideal)
    if z is None:
        return None
    return GeneratorCertificate(element=z, denominator=denom)


# -- class windows ------------------------------------------------------------

def _bisect_index(sorted_tuple, key):
    i = bisect_left(sorted_tuple, key)
    if i < len(sorted_tuple) and sorted_tuple[i] == key:
        return i
    return None


@dataclass(frozen=True)
class ClassWindow:
    """Cached per-(field, bound) class bookkeeping.

    image_elements lists, sorted, the subgroup of the full class group that
    the window classes generate; truncated_coords[i] gives the coordinates
    of image_elements[i] in the truncated presentation whose invariant
    factors are image_factors.
    """

    field: FieldSpec
    bound: int
    primes: tuple[PrimeIdealData, ...]
    group: FgAbelianGroup
    image_elements: tuple[tuple[int, ...], ...]
    image_factors: tuple[int, ...]
    truncated_coords: tuple[tuple[int, ...], ...]

    @property
    def stabilized(self) -> bool:
        return len(self.image_elements) == self.group.order()

    @property
    def m(self) -> int:
        return len(self.primes)

    def element_position(self, coords) -> int:
        key = self.group.reduce(coords)
        i = _bisect_index(self.image_elements, key)
        if i is None:
            raise InternalCheckError("class outside the generated subgroup")
        return i

    def truncated_coords_of(self, coords) -> tuple[int, ...]:
        return self.truncated_coords[self.element_position(coords)]


@lru_cache(maxsize=None)
def class_window(field: FieldSpec, bound: int) -> ClassWindow:
    primes = enumerate_primes(field, bound)
    group = target_class_group(field)
    seen = {group.zero_element()}
    for g in sorted({rec.class_coords for rec in primes}):
        if group.reduce(g) in seen:
            continue
        queue = list(seen)
        while queue:
            x = queue.pop()
            y = group.add(x, g)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    elements = tuple(sorted(seen))
    index = {el: i for i, el in enumerate(elements)}
    sub, coords, _ = abelian_structure(
        len(elements),
        lambda i, j: index[group.add(elements[i], elements[j])],
        index[group.zero_element()],
    )
    return ClassWindow(
        field=field,
        bound=bound,
        primes=primes,
        group=group,
        image_elements=elements,
        image_factors=sub.invariant_factors,
        truncated_coords=tuple(coords),
    )


def narrow_class_group_truncated(field: FieldSpec, bound: int) -> FgAbelianGroup:
    """The quotient of the window by its principal directions."""
    return _declared_group(class_window(field, bound).image_factors)


_SCAN_CEILING_FACTOR = 8  # times sqrt(|disc|); far above the classical bound


def _scan_ceiling(field: FieldSpec) -> int:
    if field.kind == "table":
        return field.table.prime_bound
    disc = abs(field.discriminant)
    return max(4, _SCAN_CEILING_FACTOR * int(disc**0.5) + 2)


def stabilization_bound(field: FieldSpec) -> int:
    """Smallest window bound whose classes generate the full class group."""
    group = target_class_group(field)
    target = group.order()
    if field.kind == "rational":
        return 1
    limit = _scan_ceiling(field)
    norms = [1] + sorted({rec.norm_int for rec in enumerate_primes(field, limit)})
    for b in norms:
        if len(class_window(field, b).image_elements) == target:
            return b
    raise UnstabilizedBoundError(
        f"window classes never generate the class group below {limit} "
        f"for {field.describe()}"
    )


def assert_stabilization_within_classical_bound(field: FieldSpec) -> int:
    """stabilization_bound plus the classical ideal-bound sanity assertion.

    Every class of a quadratic field contains an integral ideal of norm at
    most sqrt(|disc|), scaled by 2/pi for an imaginary field; the factor two
    is safety margin.  Blowing the margin indicates a bug, not bad input.
    """
    b0 = stabilization_bound(field)
    if field.kind == "quadratic":
        disc = abs(field.discriminant)
        s = 1 if field.discriminant < 0 else 0
        classical = (disc**0.5) * ((2 / 3.141592653589793) ** s) * 2
        if b0 > classical:
            raise InternalCheckError(
                f"stabilization at {b0} exceeds the classical bound "
                f"{classical:.1f} for {field.describe()}"
            )
    return b0


def stabilization_report(field: FieldSpec) -> dict:
    """Empirical stabilization: the group stops changing under growth.

    Scans distinct norm values and reports the first bound followed by three
    increments that leave the truncated group's size unchanged, together
    with the exact bound where the classes first generate everything.
    """
    if field.kind == "rational":
        return {"empirical": 1, "exact": 1, "factors": ()}
    limit = _scan_ceiling(field)
    norms = [1] + sorted({rec.norm_int for rec in enumerate_primes(field, limit)})
    sizes = [len(class_window(field, b).image_elements) for b in norms]
    empirical = None
    for i, b in enumerate(norms):
        tail = sizes[i : i + 4]
        if len(tail) == 4 and len(set(tail)) == 1:
            empirical = b
            break
    exact = stabilization_bound(field)
    win = class_window(field, exact)
    return {"empirical": empirical, "exact": exact, "factors": win.image_factors}


# -- the principal-direction lattice ------------------------------------------

@dataclass(frozen=True)
class TruncatedP1:
    """The lattice of window vectors that are narrowly principal.

    On the dense route pilot_count == m and pilot_rows is the full Hermite
    basis: upper triangular, entries nonnegative, index the product of the
    diagonal.  On the sparse route pilot_rows is the Hermite basis of the
    pilot window's principal lattice, and every remaining prime i
    contributes the implicit generator e_i + tail(class of i), where the
    tail is the pilot word inverting the class, reduced modulo pilot_rows.
    """

    field: FieldSpec
    bound: int
    primes: tuple[PrimeIdealData, ...]
    pilot_count: int
    pilot_rows: tuple[tuple[int, ...], ...]
    class_tails: tuple[tuple[int, ...], ...] | None  # sparse: per class position
    index: int

    @property
    def m(self) -> int:
        return len(self.primes)

    @property
    def is_dense(self) -> bool:
        return self.pilot_count == self.m

    def row_count(self) -> int:
        return len(self.pilot_rows) + (self.m - self.pilot_count)

    def row_exponents(self, i: int) -> dict[int, int]:
        """Generator i as a sparse exponent vector over the window."""
        k = len(self.pilot_rows)
        if i < k:
            return {j: v for j, v in enumerate(self.pilot_rows[i]) if v}
        idx = self.pilot_count + (i - k)
        win = class_window(self.field, self.bound)
        pos = win.element_position(self.primes[idx].class_coords)
        out = {j: v for j, v in enumerate(self.class_tails[pos]) if v}
        out[idx] = out.get(idx, 0) + 1
        return out

    def lattice(self) -> Lattice:
        if not self.is_dense:
            raise ValueError(
                "the lattice of a large window is deliberately not materialized"
            )
        return Lattice(self.m, IntMatrix(self.pilot_rows, cols=self.m))

    def certificate(self, i: int) -> GeneratorCertificate:
        cert = is_totally_positive_principal(
            self.field, self.row_exponents(i), self.bound
        )
        if cert is None:
            raise InternalCheckError(
                f"generator {i} of the principal lattice is not principal"
            )
        return cert

    def contains(self, exponents) -> bool:
        """Whether an exponent vector has trivial narrow class."""
        win = class_window(self.field, self.bound)
        vec = _as_vector(exponents, self.m)
        acc = win.group.zero_element()
        for v, rec in zip(vec, self.primes):
            if v:
                acc = win.group.add(acc, (x * v for x in rec.class_coords))
        return acc == win.group.zero_element()


def _dense_p1_rows(win: ClassWindow):
    group = win.group
    m = win.m
    r = len(group.invariant_factors)
    if r == 0:
        rows = [tuple(1 if j == i else 0 for j in range(m)) for i in range(m)]
        return rows, 1
    stacked = [list(rec.class_coords) for rec in win.primes]
    for i, d in enumerate(group.invariant_factors):
        stacked.append([d if j == i else 0 for j in range(r)])
    ker, _ = kernel_and_section(IntMatrix(stacked, cols=r))
    projected = [row[:m] for row in ker.basis.entries]
    hnf = hermite_normal_form(IntMatrix(projected, cols=m))
    if hnf.rows != m:
        raise InternalCheckError("principal lattice must have full rank")
    rows = [tuple(row) for row in hnf.entries]
    index = 1
    for t, row in enumerate(rows):
        if any(row[j] for j in range(t)) or row[t] <= 0:
            raise InternalCheckError("principal basis is not upper triangular")
        index *= row[t]
    return rows, index


@lru_cache(maxsize=None)
def pilot_words(field: FieldSpec):
    """(pilot bound, pilot window, per-class pilot words).

    The word for class position i is a fixed nonnegative exponent vector
    over the pilot primes whose ideal product lies in image_elements[i].
    Exists once the pilot classes generate, which stabilization_bound
    guarantees.
    """
    b0 = stabilization_bound(field)
    win = class_window(field, b0)
    group = win.group
    if not win.stabilized:
        raise UnstabilizedBoundError("pilot window does not generate the class group")
    k = win.m
    reps = {group.zero_element(): (0,) * k}
    queue = [group.zero_element()]
    while queue:
        x = queue.pop(0)
        for j, rec in enumerate(win.primes):
            y = group.add(x, rec.class_coords)
            if y not in reps:
                reps[y] = tuple(c + (1 if t == j else 0) for t, c in enumerate(reps[x]))
                queue.append(y)
    if len(reps) != group.order():
        raise InternalCheckError("pilot representatives missed a class")
    words = tuple(reps[el] for el in win.image_elements)
    return b0, win, words


def _reduce_mod_rows(vec, rows):
    """Reduce left to right modulo upper triangular rows with positive pivots."""
    red = list(vec)
    for t, row in enumerate(rows):
        q = red[t] // row[t]
        if q:
            red = [x - q * y for x, y in zip(red, row)]
    return red


def _sparse_p1_parts(win: ClassWindow):
    if not win.stabilized:
        raise UnstabilizedBoundError(
            "large windows need stabilized class data; raise the bound"
        )
    b0, pilot_win, words = pilot_words(win.field)
    k = pilot_win.m
    if win.primes[:k] != pilot_win.primes:
        raise InternalCheckError("pilot window is not a prefix of the full window")
    pilot_rows, index = _dense_p1_rows(pilot_win)
    group = win.group
    tails = []
    for el in pilot_win.image_elements:
        pos = _bisect_index(pilot_win.image_elements, group.neg(el))
        if pos is None:
            raise InternalCheckError("subgroup not closed under inversion")
        tail = _reduce_mod_rows(words[pos], pilot_rows)
        if any(x < 0 for x in tail):
            raise InternalCheckError("reduced tail left the fundamental cone")
        tails.append(tuple(tail))
    return k, pilot_rows, tuple(tails), index


def truncated_P1(field: FieldSpec, bound: int, certify: bool | None = None) -> TruncatedP1:
    """The principal-direction lattice of the window.

    Dense windows certify every Hermite basis vector eagerly by exhibiting a
    totally positive generator; a failure there is an internal error, not
    bad input.  Large windows certify through .certificate() on demand.
    Table windows carry no element arithmetic, so their rows are instead
    checked to have trivial class.
    """
    win = class_window(field, bound)
    if win.m <= DENSE_WINDOW_LIMIT:
        rows, index = _dense_p1_rows(win)
        out = TruncatedP1(
            field=field,
            bound=bound,
            primes=win.primes,
            pilot_count=win.m,
            pilot_rows=tuple(rows),
            class_tails=None,
            index=index,
        )
    else:
        k, pilot_rows, tails, index = _sparse_p1_parts(win)
        out = TruncatedP1(
            field=field,
            bound=bound,
            primes=win.primes,
            pilot_count=k,
            pilot_rows=tuple(pilot_rows),
            class_tails=tails,
            index=index,
        )
    if index != len(win.image_elements):
        raise InternalCheckError(
            "index of the principal lattice disagrees with the class count"
        )
    if field.kind == "table":
        for i in range(out.row_count()):
            if not out.contains(out.row_exponents(i)):
                raise InternalCheckError("table principal row has nontrivial class")
        return out
    if certify is None:
        certify = out.is_dense and out.row_count() <= EAGER_CERTIFICATE_LIMIT
    if certify:
        for i in range(out.row_count()):
            out.certificate(i)
    return out


def decompose_P1(field: FieldSpec, bound: int):
    """Split the principal window lattice along the norm map.

    Returns (free_basis, kernel_basis): free_basis lists pairs (exponent
    vector, factored norm) with multiplicatively independent norms, each
    normalized to norm > 1; kernel_basis spans the norm-trivial part.
    Dense windows only.
    """
    p1 = truncated_P1(field, bound, certify=False)
    if not p1.is_dense:
        raise ValueError("norm decomposition is a small-window operation")
    m = p1.m
    rationals = sorted({rec.p for rec in p1.primes})
    pcol = {p: j for j, p in enumerate(rationals)}
    norm_mat = IntMatrix(
        [
            [rec.f if pcol[rec.p] == j else 0 for j in range(len(rationals))]
            for rec in p1.primes
        ],
        cols=len(rationals),
    )
    basis = IntMatrix(p1.pilot_rows, cols=m)
    f = basis * norm_mat  # rows: factored norms of the basis vectors
    ker, section = kernel_and_section(f)
    kernel_basis = tuple(tuple(basis.apply(row)) for row in ker.basis.entries)
    image_rows = hermite_normal_form(f)
    free_basis = []
    for srow, hrow in zip(section.entries, image_rows.entries):
        vec = tuple(basis.apply(srow))
        norm = FactoredRational({p: e for p, e in zip(rationals, hrow) if e})
        if norm.value() < 1:
            vec = tuple(-x for x in vec)
            norm = norm.inverse()
        free_basis.append((vec, norm))
    return tuple(free_basis), kernel_basis
