"""Tests for the primitive-space window model."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcinv.angles import Angle
from bcinv.errors import PrecisionError
from bcinv.exact_algebra import Character
from bcinv.fields import FieldSpec, TableData, TablePrime
from bcinv.ideal_lattices import (
    enumerate_primes,
    is_totally_positive_principal,
    truncated_P1,
)
from bcinv.ideals import QuadInt
from bcinv.prim_space import (
    EQUAL,
    FIRST_SPECIALIZES,
    SECOND_SPECIALIZES,
    SEPARATED,
    PrimPoint,
    ResidueVector,
    crt_orbit_solver,
    flow_on_prim,
    gamma_S_approx,
    generator_norms,
    quasi_orbit,
    residue_vector,
    separation_relation,
    support_pattern,
)

Q = FieldSpec.rational()
K5 = FieldSpec.quadratic(-5)
K10 = FieldSpec.quadratic(10)

TABLE_FIELD = FieldSpec.from_table(
    TableData(
        name="octic-demo",
        degree=8,
        group_factors=(4,),
        primes=(
            TablePrime(2, 1, 1, (1,)),
            TablePrime(2, 1, 1, (3,)),
            TablePrime(2, 1, 2, (2,)),
        ),
        relations=(),
        prime_bound=10,
        provenance="ingested, not computed",
    )
)


# -- support patterns ------------------------------------------------------------

def test_quasi_orbit_is_the_zero_set():
    assert quasi_orbit(support_pattern(Q, 11, [])) == frozenset()
    assert quasi_orbit(support_pattern(Q, 11, ["2"])) == {"2"}
    labels = [r.label for r in enumerate_primes(Q, 11)]
    assert quasi_orbit(support_pattern(Q, 11, labels)) == set(labels)


def test_zero_set_must_live_in_window():
    with pytest.raises(ValueError):
        support_pattern(Q, 11, ["13"])
    with pytest.raises(ValueError):
        support_pattern(K5, 5, ["3"])  # split labels are 3a, 3b


# -- residue vectors -------------------------------------------------------------

def test_residue_vector_validation():
    with pytest.raises(ValueError):
        residue_vector(Q, (3, 5), 2, (1,))
    with pytest.raises(ValueError):
        ResidueVector(Q, (3, 5), 2, ((1, 0), (1, 1)))  # omega part over Q
    with pytest.raises(ValueError):
        ResidueVector(Q, (3, 5), 2, ((10, 0), (1, 0)))  # not reduced
    with pytest.raises(ValueError):
        ResidueVector(Q, (4, 5), 2, ((1, 0), (1, 0)))  # 4 not prime
    with pytest.raises(ValueError):
        ResidueVector(Q, (3, 3), 2, ((1, 0), (1, 0)))  # repeated prime
    with pytest.raises(ValueError):
        ResidueVector(Q, (3,), 0, ((1, 0),))


def test_residue_vector_reduces_inputs():
    vec = residue_vector(K5, (3,), 2, (QuadInt(-20, 11, -1),))
    assert vec.residues == ((2, 8),)


# -- crt solver ------------------------------------------------------------------

def test_solver_rational_worked_example():
    rho = residue_vector(Q, (3, 5), 2, (2, 7))
    sigma = residue_vector(Q, (3, 5), 2, (4, 14))
    lam = crt_orbit_solver(Q, rho, sigma)
    # 2*2 = 4 mod 9 and 2*7 = 14 mod 25 pin lambda to 2 mod 225
    assert (lam.u, lam.v) == (2, 0)


def test_solver_identity_case():
    rho = residue_vector(Q, (3, 5), 2, (2, 7))
    lam = crt_orbit_solver(Q, rho, rho)
    assert (lam.u, lam.v) == (1, 0)


def test_solver_support_violation_is_definitive():
    rho = residue_vector(Q, (3, 5), 2, (0, 7))
    sigma = residue_vector(Q, (3, 5), 2, (1, 14))
    assert crt_orbit_solver(Q, rho, sigma) is None


def test_solver_zero_prime_leaves_lambda_free():
    rho = residue_vector(Q, (3, 5), 2, (0, 7))
    sigma = residue_vector(Q, (3, 5), 2, (0, 14))
    lam = crt_orbit_solver(Q, rho, sigma)
    assert lam.u % 25 == 2 and lam.u > 0


def test_solver_zero_divisor_needs_precision():
    rho = residue_vector(Q, (3, 5), 2, (3, 7))
    sigma = residue_vector(Q, (3, 5), 2, (4, 14))
    with pytest.raises(PrecisionError):
        crt_orbit_solver(Q, rho, sigma)


def test_solver_window_mismatch():
    rho = residue_vector(Q, (3, 5), 2, (2, 7))
    sigma = residue_vector(Q, (3, 7), 2, (4, 14))
    with pytest.raises(ValueError):
        crt_orbit_solver(Q, rho, sigma)


def test_solver_rejects_table_fields():
    with pytest.raises(ValueError):
        crt_orbit_solver(
            TABLE_FIELD,
            residue_vector(TABLE_FIELD, (3,), 1, ((1, 0),)),
            residue_vector(TABLE_FIELD, (3,), 1, ((1, 0),)),
        )


def _mul_mod(field, a, b, q):
    d = field.discriminant if field.kind == "quadratic" else 1
    z = QuadInt(d, a[0], a[1]) * QuadInt(d, b[0], b[1])
    return (z.u % q, z.v % q)


def _random_residue(data, field, p, k, allow_zero=True):
    q = p**k
    if allow_zero and data.draw(st.booleans(), label=f"zero at {p}"):
        return (0, 0)
    d = field.discriminant if field.kind == "quadratic" else 1
    u = data.draw(st.integers(0, q - 1), label=f"u at {p}")
    v = 0 if field.kind == "rational" else data.draw(
        st.integers(0, q - 1), label=f"v at {p}"
    )
    norm = u if field.kind == "rational" else QuadInt(d, u, v).norm()
    if norm % p == 0:
        return (1, 0)  # fall back to a unit rather than rejection-sample
    return (u, v)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_solver_random_instances_verify(data):
    field = data.draw(st.sampled_from([Q, K5, K10]))
    primes = data.draw(st.sampled_from([(3, 5), (3, 7), (7, 11), (3, 5, 7)]))
    k = data.draw(st.integers(1, 2))
    rho_vals, sigma_vals = [], []
    for p in primes:
        r = _random_residue(data, field, p, k)
        rho_vals.append(r)
        if r == (0, 0):
            sigma_vals.append((0, 0))  # respect the support condition
        else:
            q = p**k
            sigma_vals.append(
                (
                    data.draw(st.integers(0, q - 1)),
                    0
                    if field.kind == "rational"
                    else data.draw(st.integers(0, q - 1)),
                )
            )
    rho = ResidueVector(field, primes, k, tuple(rho_vals))
    sigma = ResidueVector(field, primes, k, tuple(sigma_vals))
    lam = crt_orbit_solver(field, rho, sigma)
    assert lam is not None
    assert lam.is_totally_positive()
    for i, p in enumerate(primes):
        q = p**k
        got = _mul_mod(field, (lam.u % q, lam.v % q), rho.residues[i], q)
        assert got == sigma.residues[i]


@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_solver_fails_exactly_on_support_violations(data):
    field = data.draw(st.sampled_from([Q, K5]))
    primes = (3, 5)
    k = 2
    bad = data.draw(st.integers(0, 1))
    rho_vals, sigma_vals = [], []
    for i, p in enumerate(primes):
        if i == bad:
            rho_vals.append((0, 0))
            u = data.draw(st.integers(1, p**k - 1))
            sigma_vals.append((u, 0))
        else:
            rho_vals.append(_random_residue(data, field, p, k, allow_zero=False))
            sigma_vals.append((1, 0))
    rho = ResidueVector(field, primes, k, tuple(rho_vals))
    sigma = ResidueVector(field, primes, k, tuple(sigma_vals))
    assert crt_orbit_solver(field, rho, sigma) is None


# -- isotropy approximants ---------------------------------------------------------

def test_gamma_empty_zero_set_is_trivial():
    approx = gamma_S_approx(Q, [], 11, 2, 10**4)
    assert approx.lattice.rank == 0
    assert approx.stable


def test_gamma_rational_low_precision_artifacts():
    # the window is {2,3,5,7,11}; with only the congruence mod 4 active,
    # small products of odd primes that are 1 mod 4 slip in
    approx = gamma_S_approx(Q, ["3", "5", "7", "11"], 11, 2, 10**4)
    assert approx.lattice.basis.entries == (
        (0, 1, 0, 0, 1),  # 33
        (0, 0, 1, 0, 0),  # 5
        (0, 0, 0, 1, 1),  # 77
        (0, 0, 0, 0, 2),  # 121
    )
    assert not approx.stable


def test_gamma_rational_shrinks_to_trivial():
    ranks = []
    for k in (2, 5, 8, 9):
        approx = gamma_S_approx(Q, ["3", "5", "7", "11"], 11, k, 10**4)
        ranks.append(approx.lattice.rank)
    assert ranks == [4, 4, 1, 0]
    final = gamma_S_approx(Q, ["3", "5", "7", "11"], 11, 9, 10**4)
    assert final.stable


def test_gamma_single_prime_zero_set():
    approx = gamma_S_approx(Q, ["5"], 11, 2, 10**4)
    assert approx.lattice.rank == 0


def test_gamma_full_window_recovers_p1_rational():
    approx = gamma_S_approx(Q, ["2", "3", "5", "7", "11"], 11, 2, 200)
    assert approx.lattice.rank == 5  # every ideal is narrowly principal over Q


def test_gamma_full_window_recovers_p1_quadratic():
    approx = gamma_S_approx(K5, ["2", "3a", "3b", "5"], 5, 1, 9)
    assert approx.lattice == truncated_P1(K5, 5, certify=False).lattice()


def test_gamma_real_quadratic_rows_are_narrowly_principal():
    approx = gamma_S_approx(K10, ["3a", "3b"], 11, 1, 100)
    assert approx.lattice.basis.entries == ((0, 1, 3, 0), (0, 0, 4, 0))
    for row in approx.lattice.basis.entries:
        assert is_totally_positive_principal(K10, row, 11) is not None


def test_gamma_rejects_table_fields():
    with pytest.raises(ValueError):
        gamma_S_approx(TABLE_FIELD, ["2.0"], 10, 1, 100)


@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_gamma_monotone_in_precision_and_height(data):
    field, bound = data.draw(st.sampled_from([(Q, 11), (K5, 5), (K10, 11)]))
    labels = [r.label for r in enumerate_primes(field, bound)]
    zero = data.draw(st.sets(st.sampled_from(labels), max_size=len(labels)))
    k = data.draw(st.integers(1, 3))
    height = data.draw(st.sampled_from([20, 80, 200]))
    coarse = gamma_S_approx(field, zero, bound, k, height)
    fine = gamma_S_approx(field, zero, bound, k + 1, height)
    for row in fine.lattice.basis.entries:
        assert coarse.lattice.contains(row)
    taller = gamma_S_approx(field, zero, bound, k, height * 3)
    for row in coarse.lattice.basis.entries:
        assert taller.lattice.contains(row)


# -- separation ---------------------------------------------------------------------

def test_separation_named_cases():
    assert separation_relation({"2"}, {"2"}).kind == EQUAL
    verdict = separation_relation({"2"}, {"3"})
    assert verdict.kind == SEPARATED
    assert verdict.witness == {"2"}
    assert separation_relation(set(), {"2"}).kind == FIRST_SPECIALIZES
    assert separation_relation({"2", "3"}, {"3"}).kind == SECOND_SPECIALIZES


def test_separation_trichotomy_on_power_set():
    labels = [r.label for r in enumerate_primes(Q, 11)]
    assert len(labels) == 5
    subsets = []
    for mask in range(32):
        subsets.append(frozenset(l for i, l in enumerate(labels) if mask >> i & 1))
    for a in subsets:
        for b in subsets:
            verdict = separation_relation(a, b)
            if a == b:
                assert verdict.kind == EQUAL
            elif a < b:
                assert verdict.kind == FIRST_SPECIALIZES
            elif b < a:
                assert verdict.kind == SECOND_SPECIALIZES
            else:
                assert verdict.kind == SEPARATED
                # the witness open set contains b's point and misses a's
                assert verdict.witness <= a - b
                assert verdict.witness
                assert not verdict.witness & b


# -- the flow -----------------------------------------------------------------------

def full_window_point():
    approx = gamma_S_approx(Q, ["2", "3", "5", "7", "11"], 11, 2, 200)
    gamma = Character(tuple(Angle.zero() for _ in range(approx.lattice.rank)))
    return PrimPoint(approx, gamma)


def test_flow_zero_time_is_identity():
    point = full_window_point()
    assert flow_on_prim(point, 0.0) == point


def test_flow_preserves_zero_set_and_moves_character():
    point = full_window_point()
    moved = flow_on_prim(point, 1.5)
    assert moved.zero_set == point.zero_set
    assert moved != point


def test_flow_frequencies_are_window_norms():
    point = full_window_point()
    norms = [n.value() for n in generator_norms(point.approximant)]
    assert norms == [2, 3, 5, 7, 11]


def test_trivial_approximant_is_fixed():
    approx = gamma_S_approx(Q, [], 11, 2, 10**4)
    point = PrimPoint(approx, Character(()))
    for t in (0.0, 1.0, math.tau):
        assert flow_on_prim(point, t) == point


def test_orbit_of_nontrivial_point_never_returns():
    point = full_window_point()
    for m in range(1, 51):
        moved = flow_on_prim(point, math.tau * m)
        gaps = [
            (a - b).distance_to_zero()
            for a, b in zip(moved.character.angles, point.character.angles)
        ]
        assert max(gaps) > 1e-9


def test_point_validates_character_rank():
    approx = gamma_S_approx(Q, [], 11, 2, 100)
    with pytest.raises(ValueError):
        PrimPoint(approx, Character((Angle.zero(),)))
