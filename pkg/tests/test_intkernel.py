import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eisen.errors import FactorTooHard, RankDeficient
from eisen.intkernel import (
    FactorConfig,
    FpPoly,
    det_bareiss,
    factor_integer,
    factor_poly_mod_p,
    hnf,
    hnf_square,
    int_poly_discriminant,
    interpolate,
    is_prime,
    lattice_member_mask,
    sieve,
    solve_in_lattice,
)

SMALL_PRIMES = [int(p) for p in sieve(97)]


def fp(p, *coeffs):
    return FpPoly(p, coeffs)


@pytest.mark.parametrize("n,expected", [(2, True), (561, False), (2147483647, True), (0, False), (1, False)])
def test_is_prime_examples(n, expected):
    assert is_prime(n) is expected


def test_is_prime_matches_sieve():
    limit = 10**6
    flags = np.zeros(limit + 1, dtype=bool)
    flags[sieve(limit)] = True
    rng = random.Random(1)
    for n in rng.sample(range(limit + 1), 5000):
        assert is_prime(n) == flags[n]


def test_is_prime_large():
    assert is_prime(2**61 - 1)
    assert not is_prime((2**61 - 1) * (2**31 - 1))
    assert is_prime(2**127 - 1)


@pytest.mark.parametrize(
    "n,expected", [(12, [(2, 2), (3, 1)]), (1, []), (1000003, [(1000003, 1)]), (-12, [(2, 2), (3, 1)])]
)
def test_factor_integer_examples(n, expected):
    assert factor_integer(n) == expected


def test_factor_integer_zero():
    with pytest.raises(ValueError):
        factor_integer(0)


@given(st.integers(min_value=1, max_value=10**15))
def test_factor_integer_recombines(n):
    f = factor_integer(n)
    prod = 1
    for p, e in f:
        assert is_prime(p) and e >= 1
        prod *= p**e
    assert prod == n
    assert [p for p, _ in f] == sorted(p for p, _ in f)


def test_factor_integer_semiprime_with_rho():
    p, q = 1000000007, 998244353
    assert factor_integer(p * q) == [(q, 1), (p, 1)]


def test_factor_too_hard_above_bound():
    p, q = 2**61 - 1, 2**89 - 1
    with pytest.raises(FactorTooHard):
        factor_integer(p * q * 1000003 * 1000033, FactorConfig(rho_budget=10, cofactor_bound=2**20))


def test_factor_poly_examples():
    assert factor_poly_mod_p(fp(5, 1, 0, 1)) == [(fp(5, 2, 1), 1), (fp(5, 3, 1), 1)]
    assert factor_poly_mod_p(fp(3, 1, 0, 1)) == [(fp(3, 1, 0, 1), 1)]
    assert factor_poly_mod_p(fp(7, 0, 0, 1)) == [(fp(7, 0, 1), 2)]


def _is_irreducible_bruteforce(g: FpPoly) -> bool:
    p, n = g.p, g.degree
    for deg in range(1, n // 2 + 1):
        for tail in product(range(p), repeat=deg):
            h = FpPoly(p, tail + (1,))
            if not g % h:
                return False
    return True


@given(st.sampled_from(SMALL_PRIMES), st.lists(st.integers(0, 96), min_size=2, max_size=9), st.integers(0, 3))
def test_factor_poly_recombines(p, coeffs, seed):
    f = FpPoly(p, coeffs)
    if f.degree < 1:
        return
    factors = factor_poly_mod_p(f, seed)
    prod = FpPoly(p, [f.lc])
    for g, e in factors:
        assert g.lc == 1 and g.degree >= 1
        for _ in range(e):
            prod = prod * g
    assert prod == f
    roots = sum(1 for x in range(p) if f(x) == 0)
    assert roots == sum(1 for g, _ in factors if g.degree == 1)


def test_factor_poly_irreducible_factors_small():
    rng = random.Random(5)
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        f = FpPoly(p, [rng.randrange(p) for _ in range(6)] + [1])
        for g, _ in factor_poly_mod_p(f):
            assert _is_irreducible_bruteforce(g)


def test_factor_poly_is_deterministic():
    f = FpPoly(97, [3, 1, 4, 1, 5, 9, 2, 6, 1])
    assert factor_poly_mod_p(f) == factor_poly_mod_p(f)


def test_hnf_examples():
    assert hnf([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert hnf([[2, 0], [0, 2], [1, 1]]) == ((1, 1), (0, 2))
    assert hnf([[0, 0], [0, 0]]) == ()
    with pytest.raises(RankDeficient):
        hnf_square([[0, 0], [0, 0]], 2)


def _in_span_bruteforce(rows, v, bound=12):
    k = len(rows)
    for cs in product(range(-bound, bound + 1), repeat=k):
        if all(sum(c * r[j] for c, r in zip(cs, rows)) == v[j] for j in range(len(v))):
            return True
    return False


matrices = st.integers(2, 3).flatmap(
    lambda k: st.lists(st.lists(st.integers(-5, 5), min_size=k, max_size=k), min_size=k, max_size=k + 1)
)


@given(matrices)
def test_hnf_idempotent_and_canonical(m):
    h = hnf(m)
    assert hnf(h) == h
    for i, row in enumerate(h):
        piv = next(j for j, x in enumerate(row) if x)
        assert row[piv] > 0
        for above in h[:i]:
            assert 0 <= above[piv] < row[piv]


def _in_span_cramer(rows, v):
    """v = c . rows with c = v . rows^-1; Cramer's rule, then integrality."""
    det = det_bareiss(rows)
    for i in range(len(rows)):
        swapped = [list(v) if j == i else list(r) for j, r in enumerate(rows)]
        if det_bareiss(swapped) % det:
            return False
    return True


@given(matrices, st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_solve_in_lattice_oracles(m, v):
    k = len(m[0])
    v = v[:k]
    h = hnf(m)
    if len(h) < k:
        return
    got = solve_in_lattice(h, v)
    assert got == _in_span_cramer(h, v)
    if k == 2:
        assert got == _in_span_bruteforce(h, v, bound=30)
    assert got == solve_in_lattice(hnf(list(h) + list(m)), v)


def test_solve_in_lattice_examples():
    assert solve_in_lattice([[2, 0], [0, 2]], (4, 6))
    assert not solve_in_lattice([[2, 0], [0, 2]], (1, 0))
    assert solve_in_lattice(hnf([[2, 0], [1, 1]]), (3, 1))
    with pytest.raises(RankDeficient):
        solve_in_lattice([[1, 0]], (1, 0))


def test_lattice_member_mask_matches_scalar():
    basis = hnf([[3, 0], [1, 1], [0, 3]])
    pts = np.array(list(product(range(-7, 7), repeat=2)))
    mask = lattice_member_mask(np.array(basis), 3, pts)
    assert list(mask) == [solve_in_lattice(basis, tuple(x)) for x in pts]


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_bareiss_matches_fraction_elimination(m):
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for i in range(4):
        piv = next((r for r in range(i, 4) if a[r][i]), None)
        if piv is None:
            det = Fraction(0)
            break
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            det = -det
        det *= a[i][i]
        for r in range(i + 1, 4):
            f = a[r][i] / a[i][i]
            a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    assert det_bareiss(m) == det


def test_int_poly_discriminant():
    assert int_poly_discriminant([-1, -1, 0, 1]) == -23
    assert int_poly_discriminant([1, 0, 1]) == -4
    assert int_poly_discriminant([5, 3]) == 1
    assert int_poly_discriminant([-2, 0, 0, 1]) == -108


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=7))
def test_interpolate_roundtrip(coeffs):
    xs = list(range(-3, len(coeffs) - 3))
    ys = [sum(c * x**i for i, c in enumerate(coeffs)) for x in xs]
    out = interpolate(xs, ys)
    assert list(out) + [0] * (len(coeffs) - len(out)) == coeffs
