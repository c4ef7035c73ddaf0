import pickle
import random

import pytest
from hypothesis import given, strategies as st

from eisen.errors import FieldRejected, NotMaximalAtP, ParseError, ResidueFieldTooLarge
from eisen.intkernel import FpPoly
from eisen.numberfield import (
    IdealLattice,
    NumberField,
    field_norm,
    ideal_contains,
    ideal_mul,
    nf_add,
    nf_mul,
    parse_polynomial,
    primes_up_to,
    read_field_descriptor,
    residue_representatives,
    split_prime,
    valuation,
)

from conftest import CORPUS

coords2 = st.tuples(st.integers(-30, 30), st.integers(-30, 30))


@pytest.mark.parametrize(
    "text,expected",
    [
        ("x^2+1", (1, 0, 1)),
        ("x^3 - x - 1", (-1, -1, 0, 1)),
        ("2x^2 + 3*x - 4", (-4, 3, 2)),
        (" -x + x^2 + x ", (0, 0, 1)),
        ("x", (0, 1)),
        ("x^0 + 5", (6,)),
        ("3 x ^ 2", (0, 0, 3)),
    ],
)
def test_parse_polynomial(text, expected):
    assert parse_polynomial(text) == expected


@pytest.mark.parametrize("text", ["", "x^", "x^2 x", "y^2+1", "x^-1", "1.5x"])
def test_parse_polynomial_rejects(text):
    with pytest.raises(ParseError):
        parse_polynomial(text)


def test_descriptor_file(tmp_path):
    p = tmp_path / "field.txt"
    p.write_text("# Gaussian integers\n\nf = x^2+1\n")
    assert read_field_descriptor(p) == (1, 0, 1)
    p.write_text("g = x^2+1\n")
    with pytest.raises(ParseError):
        read_field_descriptor(p)


def test_field_rejections():
    with pytest.raises(ParseError):
        NumberField("2")
    with pytest.raises(FieldRejected):
        NumberField("2x^2+1")
    with pytest.raises(FieldRejected):
        NumberField("x^2-4")
    with pytest.raises(FieldRejected):
        NumberField("x^3")


def test_irreducibility_flag(fields):
    assert all(F.irreducibility_certified for F in fields.values())
    assert NumberField("x^4+x+1").irreducibility_certified  # irreducible mod 2
    # (x^2+2x+2)(x^2-2x+2): no rational root and reducible mod every prime, so undecided
    assert NumberField("x^4+4").irreducibility_certified is False


def test_arithmetic_examples(Qi, Qsqrt2):
    i = Qi((0, 1))
    assert nf_mul(i, i) == Qi((-1, 0))
    assert nf_mul(Qi((3, 4)), Qi.one) == Qi((3, 4))
    assert nf_mul(Qsqrt2((1, 1)), Qsqrt2((1, -1))) == Qsqrt2((-1, 0))
    assert nf_add(i, Qi.one) == Qi((1, 1))
    assert i**4 == Qi.one


def test_norm_examples(Qi, Qsqrt2):
    assert field_norm(Qi.one) == 1
    assert field_norm(Qi((3, 4))) == 25
    assert field_norm(Qsqrt2((0, 1))) == -2
    assert field_norm(NumberField("x^3-2")((0, 1, 0))) == 2


@pytest.mark.parametrize("poly", CORPUS)
def test_ring_axioms_and_norm_multiplicative(poly):
    F = NumberField(poly)
    rng = random.Random(poly)
    for _ in range(50):
        a, b, c = (F(tuple(rng.randint(-9, 9) for _ in range(F.degree))) for _ in range(3))
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert field_norm(a * b) == field_norm(a) * field_norm(b)


def test_split_examples(Qi):
    five = split_prime(Qi, 5)
    assert [(P.g.coeffs, P.e, P.residue_degree) for P in five] == [((2, 1), 1, 1), ((3, 1), 1, 1)]
    (three,) = split_prime(Qi, 3)
    assert (three.e, three.residue_degree, three.norm) == (1, 2, 9)
    (two,) = split_prime(Qi, 2)
    assert (two.g.coeffs, two.e, two.residue_degree) == ((1, 1), 2, 1)


def test_primes_up_to_examples(Q, Qi):
    assert [P.p for P in primes_up_to(Q, 10)] == [2, 3, 5, 7]
    assert [(P.p, P.e, P.norm) for P in primes_up_to(Qi, 5)] == [(2, 2, 2), (3, 1, 9), (5, 1, 5), (5, 1, 5)]
    assert primes_up_to(Qi, 1) == []


@pytest.mark.parametrize("poly", CORPUS)
def test_splitting_identity(poly):
    F = NumberField(poly)
    for P0 in primes_up_to(NumberField("x"), 200):
        p = P0.p
        ps = split_prime(F, p)
        assert sum(P.e * P.residue_degree for P in ps) == F.degree
        prod = 1
        for P in ps:
            prod *= P.norm**P.e
        assert prod == p**F.degree


@pytest.mark.parametrize("poly", CORPUS[1:])
def test_distinct_primes_comaximal(poly):
    F = NumberField(poly)
    unit = IdealLattice.unit(F)
    for p in (2, 3, 5, 7, 11, 13):
        ps = split_prime(F, p)
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                assert ps[i].lattice + ps[j].lattice == unit


def test_not_maximal():
    F = NumberField("x^2+3")  # Z[sqrt(-3)] is not 2-maximal
    with pytest.raises(NotMaximalAtP) as exc:
        split_prime(F, 2)
    assert exc.value.p == 2
    assert len(split_prime(F, 3)) == 1
    with pytest.raises(NotMaximalAtP):
        primes_up_to(NumberField("x^2-5"), 10)


def test_ideal_mul_examples(Q, Qi):
    two = IdealLattice.from_generators(Q, [Q(2)])
    three = IdealLattice.from_generators(Q, [Q(3)])
    assert ideal_mul(two, three) == IdealLattice.from_generators(Q, [Q(6)])
    (P2,) = split_prime(Qi, 2)
    assert ideal_mul(P2.lattice, P2.lattice).hnf_basis == ((2, 0), (0, 2))
    assert P2.lattice * IdealLattice.unit(Qi) == P2.lattice


def test_ideal_norm_multiplicative(fields):
    for F in fields.values():
        ps = primes_up_to(F, 13)
        for P in ps:
            for Q_ in ps:
                assert (P.lattice * Q_.lattice).norm == P.norm * Q_.norm
            assert P.power(3).norm == P.norm**3


def test_ideal_contains_examples(Q, Qi):
    (P,) = split_prime(Q, 2)
    assert ideal_contains(P.lattice, Q.zero)
    assert ideal_contains(P.power(2), Q(4))
    assert not ideal_contains(P.power(2), Q(2))
    (P2,) = split_prime(Qi, 2)
    assert ideal_contains(P2.lattice, Qi((1, 1)))
    assert not ideal_contains(P2.power(2), Qi((1, 1)))


def test_valuation_examples(Q, Qi):
    (P3,) = split_prime(Q, 3)
    assert valuation(P3, Q(18), 5) == 2
    assert valuation(P3, Q(1), 5) == 0
    (P2,) = split_prime(Qi, 2)
    assert valuation(P2, Qi(2), 4) == 2
    assert valuation(P2, Qi(0), 3) == 3


@pytest.mark.parametrize("poly", ["x", "x^2+1", "x^3-2"])
def test_valuation_one_iff_in_p_not_p2(poly):
    F = NumberField(poly)
    rng = random.Random(7)
    ps = primes_up_to(F, 7)
    for _ in range(1000):
        x = F(tuple(rng.randint(-60, 60) for _ in range(F.degree)))
        P = rng.choice(ps)
        assert (P.contains(x) and not P.power(2).contains(x)) == (valuation(P, x, 2) == 1)


@given(coords2, coords2)
def test_valuation_additive(a, b):
    F = NumberField("x^2+1")
    x, y = F(a), F(b)
    if not x or not y:
        return
    for P in primes_up_to(F, 5):
        vx, vy = valuation(P, x, 8), valuation(P, y, 8)
        if vx + vy < 8:
            assert valuation(P, x * y, 8) == vx + vy


def test_residue_representatives(Q, Qi):
    (P3,) = split_prime(Q, 3)
    assert [r.coords for r in residue_representatives(P3)] == [(0,), (1,), (2,)]
    (I3,) = split_prime(Qi, 3)
    reps = residue_representatives(I3)
    assert sorted(r.coords for r in reps) == [(a, b) for a in range(3) for b in range(3)]
    P5 = split_prime(Qi, 5)[0]
    assert [r.coords for r in residue_representatives(P5)] == [(c, 0) for c in range(5)]
    with pytest.raises(ResidueFieldTooLarge):
        residue_representatives(I3, bound=5)


@pytest.mark.parametrize("poly", CORPUS)
def test_residue_representatives_incongruent(poly):
    F = NumberField(poly)
    for P in primes_up_to(F, 5):
        reps = residue_representatives(P)
        assert len(reps) == P.norm
        for i, a in enumerate(reps):
            for b in reps[i + 1 :]:
                assert not P.contains(a - b)


def test_residue_and_lift_roundtrip(Qi):
    for P in primes_up_to(Qi, 13):
        for r in residue_representatives(P):
            assert P.residue(P.lift(P.residue(r))) == P.residue(r)
            assert P.lattice.contains(r - P.lift(P.residue(r)))


def test_primes_dividing(Qi):
    ps = Qi.primes_dividing(Qi((1, 1)))
    assert [P.p for P in ps] == [2]
    ps = Qi.primes_dividing(Qi(15))
    assert [(P.p, P.norm) for P in ps] == [(3, 9), (5, 5), (5, 5)]
    assert Qi.primes_dividing(Qi((0, 1))) == []


def test_field_pickles(Qi):
    F = pickle.loads(pickle.dumps(Qi))
    assert F == Qi and F.degree == 2
