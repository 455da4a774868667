"""Flow invariants of the norm dynamics, and what they recover.

The time evolution acts on a truncated window through the norms of its
principal directions.  Everything here is derived from that lattice of
norms alone: the frequency content of the flow, a comparison invariant
for pairs of fields, and a procedure that reads off how a rational prime
decomposes without ever being told.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import gcd

from .errors import BoundTooSmallError
from .exact_algebra import Lattice
from .factored import FactoredRational
from .fields import FieldSpec, is_prime, primes_upto
from .ideal_lattices import TruncatedP1, class_window, decompose_P1, enumerate_primes, target_class_group, truncated_P1

ESCALATION_CEILING = 10**6

DISTINGUISHED = "distinguished"
INDISTINGUISHABLE = "indistinguishable_at_bound"

SPLIT_CAVEAT = "a ramified prime is reported as not_inert"


@dataclass(frozen=True)
class FlowModel:
    """Frequency data of the induced flow on a truncated window.

    The flow factors as a dense winding on a torus of dimension free_rank
    (one coordinate per frequency, all multiplicatively independent and
    normalized to exceed 1) times a fixed part of dimension fixed_rank on
    which time acts trivially.
    """

    field: FieldSpec
    bound: int
    basis: tuple[tuple[int, ...], ...]
    frequencies: tuple[FactoredRational, ...]
    fixed_rank: int

    def __post_init__(self):
        if len(self.basis) != len(self.frequencies):
            raise ValueError("one basis vector per frequency")
        if self.fixed_rank < 0:
            raise ValueError("fixed_rank must be nonnegative")
        for q in self.frequencies:
            if q.value() <= 1:
                raise ValueError(f"frequencies are normalized to exceed 1, got {q.value()}")

    @property
    def free_rank(self) -> int:
        return len(self.frequencies)


def build_flow(field: FieldSpec, bound: int) -> FlowModel:
    """Decompose the principal window along the norm map into a flow model.

    Small windows only; the decomposition needs the materialized lattice.
    """
    free, kernel = decompose_P1(field, bound)
    return FlowModel(
        field=field,
        bound=bound,
        basis=tuple(vec for vec, _ in free),
        frequencies=tuple(q for _, q in free),
        fixed_rank=len(kernel),
    )


def check_frequency_independence(frequencies) -> bool:
    """Whether a family of positive rationals is multiplicatively independent.

    Accepts a FlowModel or any iterable of FactoredRational.  Independence
    means the exponent vectors have full row rank over the integers, so no
    product of integer powers collapses to 1.
    """
    if isinstance(frequencies, FlowModel):
        freqs = frequencies.frequencies
    else:
        freqs = tuple(frequencies)
    support = sorted({p for q in freqs for p in q.support()})
    col = {p: j for j, p in enumerate(support)}
    rows = []
    for q in freqs:
        vec = [0] * len(support)
        for p, e in q.exponents:
            vec[col[p]] = e
        rows.append(tuple(vec))
    lat = Lattice.from_generators(len(support), rows)
    return lat.rank == len(freqs)


@dataclass(frozen=True)
class NormImageLattice:
    """Image of the principal window lattice under the norm map.

    Coordinates are all rational primes up to the bound, shared between
    fields so images are directly comparable.  Small windows carry the
    Hermite basis; large windows answer single-prime projection queries
    without materializing anything.
    """

    field: FieldSpec
    bound: int
    coords: tuple[int, ...]
    dense_lattice: Lattice | None
    window: TruncatedP1 = dc_field(repr=False)

    def lattice(self) -> Lattice:
        if self.dense_lattice is None:
            raise ValueError("the norm image of a large window is deliberately not materialized")
        return self.dense_lattice

    def projection(self, p: int) -> int:
        """Generator g >= 0 of the image's projection to the p coordinate.

        Every principal direction in the window has p-adic norm valuation
        divisible by g, and g is attained.  Zero means no window generator
        touches p at this bound.
        """
        win = self.window
        recs = win.primes
        above = [j for j, r in enumerate(recs) if r.p == p]
        g = 0
        for row in win.pilot_rows:
            c = sum(recs[j].f * row[j] for j in above if j < len(row))
            g = gcd(g, c)
        if win.is_dense:
            return g
        # implicit generators e_i + tail(class of i), tails over pilot positions
        cw = class_window(self.field, self.bound)
        tail_above = [
            sum(recs[j].f * tail[j] for j in above if j < win.pilot_count)
            for tail in win.class_tails
        ]
        above_set = set(above)
        for idx in range(win.pilot_count, win.m):
            pos = cw.element_position(recs[idx].class_coords)
            c = tail_above[pos] + (recs[idx].f if idx in above_set else 0)
            g = gcd(g, c)
            if g == 1:
                return 1
        return g


def norm_image(field: FieldSpec, bound: int) -> NormImageLattice:
    """Push the principal window lattice through the norm map."""
    win = truncated_P1(field, bound, certify=False)
    coords = tuple(primes_upto(bound))
    dense_lat = None
    if win.is_dense:
        pcol = {p: j for j, p in enumerate(coords)}
        recs = win.primes
        rows = []
        for row in win.pilot_rows:
            vec = [0] * len(coords)
            for j, v in enumerate(row):
                if v:
                    vec[pcol[recs[j].p]] += recs[j].f * v
            rows.append(tuple(vec))
        dense_lat = Lattice.from_generators(len(coords), rows)
    return NormImageLattice(field=field, bound=bound, coords=coords, dense_lattice=dense_lat, window=win)


def prime_norm_multiset(field: FieldSpec, bound: int) -> tuple[int, ...]:
    """Sorted norms of the window primes, with multiplicity."""
    return tuple(sorted(rec.norm_int for rec in enumerate_primes(field, bound)))


@dataclass(frozen=True)
class FieldComparison:
    """Outcome of comparing two fields through their truncated flow data.

    verdict is 'distinguished' or 'indistinguishable_at_bound'; the latter
    is an honest statement about this bound only, never a claim that the
    fields agree.
    """

    verdict: str
    invariant: str | None
    witness: str | None
    bound: int

    def __str__(self):
        if self.verdict == DISTINGUISHED:
            return f"{DISTINGUISHED} by {self.invariant}: {self.witness}"
        return f"{INDISTINGUISHABLE} {self.bound}"


def _norm_image_witness(lat_k: Lattice, lat_l: Lattice, coords) -> str:
    rows_k = lat_k.basis.entries
    rows_l = lat_l.basis.entries
    if len(rows_k) != len(rows_l):
        return f"norm image ranks {len(rows_k)} and {len(rows_l)}"
    for rk, rl in zip(rows_k, rows_l):
        for j, (a, b) in enumerate(zip(rk, rl)):
            if a != b:
                return f"Hermite bases differ at prime {coords[j]}"
    raise AssertionError("unequal lattices with equal bases")


def compare_fields(field_k: FieldSpec, field_l: FieldSpec, bound: int) -> FieldComparison:
    """Compare two fields by flow invariants at a common truncation bound.

    Checks run coarsest first: narrow class number, then the norm image
    lattice over shared prime coordinates, then the multiset of window
    prime norms.  A difference in any is a certified distinction; agreement
    in all three only ever earns 'indistinguishable_at_bound'.
    """
    h_k = target_class_group(field_k).order()
    h_l = target_class_group(field_l).order()
    if h_k != h_l:
        return FieldComparison(
            verdict=DISTINGUISHED,
            invariant="narrow_class_number",
            witness=f"narrow class numbers {h_k} and {h_l}",
            bound=bound,
        )
    img_k = norm_image(field_k, bound)
    img_l = norm_image(field_l, bound)
    if img_k.dense_lattice is None or img_l.dense_lattice is None:
        raise ValueError("field comparison is a small-window operation")
    if img_k.dense_lattice != img_l.dense_lattice:
        witness = _norm_image_witness(img_k.dense_lattice, img_l.dense_lattice, img_k.coords)
        return FieldComparison(
            verdict=DISTINGUISHED, invariant="norm_image", witness=witness, bound=bound
        )
    norms_k = prime_norm_multiset(field_k, bound)
    norms_l = prime_norm_multiset(field_l, bound)
    if norms_k != norms_l:
        seen = sorted(set(norms_k) | set(norms_l))
        for v in seen:
            ck, cl = norms_k.count(v), norms_l.count(v)
            if ck != cl:
                witness = f"prime norm {v} occurs {ck} versus {cl} times"
                break
        return FieldComparison(
            verdict=DISTINGUISHED, invariant="prime_norms", witness=witness, bound=bound
        )
    return FieldComparison(verdict=INDISTINGUISHABLE, invariant=None, witness=None, bound=bound)


@dataclass(frozen=True)
class SplitVerdict:
    """What the norm image says about one rational prime.

    generator is the projection of the image to the p coordinate.  The
    verdict separates inert from everything else; see notes for the
    standing caveats that come with that coarseness.
    """

    verdict: str
    p: int
    degree: int
    bound: int
    generator: int
    notes: tuple[str, ...]


def recover_split(image: NormImageLattice, p: int, degree: int) -> SplitVerdict:
    """Decide from the norm image alone whether p is inert.

    The projection of the image to the p coordinate is g * Z.  An inert p
    forces every norm to carry p in multiples of the field degree, so
    g >= degree reads as inert; any smaller positive g witnesses a prime
    of lower residue degree above p.  g == 0 means the window is silent
    about p and the bound must grow.
    """
    if not is_prime(p):
        raise ValueError(f"not a prime: {p}")
    if degree < 1:
        raise ValueError("degree must be positive")
    if image.bound < p**degree:
        raise BoundTooSmallError(
            f"bound {image.bound} cannot see an inert prime above {p}; need at least {p**degree}",
            bound=image.bound,
        )
    g = image.projection(p)
    if g == 0:
        raise BoundTooSmallError(
            f"no window generator touches {p} at bound {image.bound}",
            bound=image.bound,
        )
    notes = [SPLIT_CAVEAT]
    if degree == 1:
        # nothing to decide in degree 1, but say so rather than pretend
        notes.append("degree one leaves no room for an inert prime")
        verdict = "not_inert"
    else:
        verdict = "inert" if g >= degree else "not_inert"
    return SplitVerdict(
        verdict=verdict, p=p, degree=degree, bound=image.bound, generator=g, notes=tuple(notes)
    )


def recover_split_with_escalation(
    field: FieldSpec,
    p: int,
    degree: int = 2,
    start_bound: int | None = None,
    ceiling: int = ESCALATION_CEILING,
) -> SplitVerdict:
    """recover_split with the bound doubled until the window speaks.

    Starts at max(1000, p**degree) unless told otherwise and gives up at
    the ceiling by re-raising the last BoundTooSmallError.
    """
    bound = start_bound if start_bound is not None else max(1000, p**degree)
    bound = max(bound, p**degree)
    while True:
        try:
            return recover_split(norm_image(field, bound), p, degree)
        except BoundTooSmallError:
            if 2 * bound > ceiling:
                raise
            bound *= 2
