"""Exact integer machinery: primality, factoring, polynomials over F_p, and
integer lattices in Hermite normal form.

Rationals are :class:`fractions.Fraction` (or ``gmpy2.mpq`` in the analytic
engine); integers are plain Python ints throughout.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import FactorTooHard, RankDeficient

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, math.isqrt(p) + 1))]
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # deterministic below 3.3e24


def _mr_witness(n, d, s, a):
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Miller-Rabin. Deterministic below 2**64; above, 64 extra bases keep the
    error under 2**-128."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        if _mr_witness(n, d, s, a):
            return False
    if n < 1 << 64:
        return True
    rng = random.Random(n)  # bases derived from n so the answer is reproducible
    for _ in range(64):
        if _mr_witness(n, d, s, rng.randrange(2, n - 1)):
            return False
    return True


def sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if flags[i]:
            flags[i * i :: 2 * i] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass(frozen=True)
class FactorConfig:
    """Pollard-rho iteration budget and the cofactor size above which running
    out of budget is fatal."""

    rho_budget: int = 200_000
    cofactor_bound: int = 1 << 96


DEFAULT_FACTOR_CONFIG = FactorConfig()


def _brent(n, c, budget):
    # Brent's cycle variant of Pollard rho; returns (factor or None, steps used).
    y, m, g, r, q = 2, 128, 1, 1, 1
    x = ys = y
    steps = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        steps += 2 * r
        r *= 2
        if budget is not None and steps > budget:
            return None, steps
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return (g if g != n else None), steps


def _split(n, config):
    r = math.isqrt(n)
    if r * r == n:
        return r
    # cofactors under the bound are always finished; larger ones get a budget
    remaining = config.rho_budget if n > config.cofactor_bound else None
    c = 1
    while True:
        g, steps = _brent(n, c, remaining)
        if g is not None:
            return g
        if remaining is not None:
            remaining -= steps
            if remaining <= 0:
                raise FactorTooHard(n)
        c += 1


def factor_integer(n: int, config: FactorConfig = DEFAULT_FACTOR_CONFIG) -> list[tuple[int, int]]:
    """Prime factorization of |n| as a sorted list of (prime, exponent)."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        g = _split(m, config)
        stack.extend((g, m // g))
    return sorted(out.items())


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# Polynomials over F_p


class FpPoly:
    """Polynomial over F_p, coefficients stored low degree first.

    The zero polynomial has ``coeffs == ()`` and degree -1.
    """

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int] = ()):
        c = [x % p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.p = p
        self.coeffs = tuple(c)

    @classmethod
    def x(cls, p):
        return cls(p, (0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FpPoly):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == FpPoly(self.p, (other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __lt__(self, other):
        return (self.degree, self.coeffs) < (other.degree, other.coeffs)

    def __repr__(self):
        return f"FpPoly({self.p}, {list(self.coeffs)})"

    def __str__(self):
        return format_poly(self.coeffs) if self.coeffs else "0"

    def _coerce(self, other):
        if isinstance(other, int):
            return FpPoly(self.p, (other,))
        return other

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return FpPoly(self.p, [x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return FpPoly(self.p, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FpPoly(self.p)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return FpPoly(self.p, out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        db = other.degree
        inv = pow(other.lc, -1, p)
        q = [0] * max(len(r) - db, 0)
        b = other.coeffs
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] * inv % p
            if c:
                q[i - db] = c
                for j in range(db + 1):
                    r[i - db + j] = (r[i - db + j] - c * b[j]) % p
        return FpPoly(p, q), FpPoly(p, r[:db] if db > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def monic(self) -> "FpPoly":
        if not self.coeffs:
            return self
        inv = pow(self.lc, -1, self.p)
        return FpPoly(self.p, [c * inv for c in self.coeffs])

    def derivative(self) -> "FpPoly":
        return FpPoly(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def powmod(self, e: int, mod: "FpPoly") -> "FpPoly":
        result = FpPoly(self.p, (1,)) % mod
        base = self % mod
        while e:
            if e & 1:
                result = result * base % mod
            e >>= 1
            if e:
                base = base * base % mod
        return result


def poly_gcd(a: FpPoly, b: FpPoly) -> FpPoly:
    while b:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: FpPoly, b: FpPoly) -> tuple[FpPoly, FpPoly, FpPoly]:
    """(g, s, t) with s*a + t*b = g monic."""
    p = a.p
    r0, r1 = a, b
    s0, s1 = FpPoly(p, (1,)), FpPoly(p)
    t0, t1 = FpPoly(p), FpPoly(p, (1,))
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = pow(r0.lc, -1, p)
    return r0 * inv, s0 * inv, t0 * inv


def poly_invmod(a: FpPoly, mod: FpPoly) -> FpPoly:
    g, s, _ = poly_xgcd(a % mod, mod)
    if g.degree != 0:
        raise ZeroDivisionError("not invertible modulo the given polynomial")
    return s % mod


def _pth_root(f: FpPoly) -> FpPoly:
    p = f.p
    return FpPoly(p, f.coeffs[::p])


def _squarefree(f: FpPoly) -> list[tuple[FpPoly, int]]:
    # f monic, nonconstant
    p = f.p
    out = []
    df = f.derivative()
    if df:
        c = poly_gcd(f, df)
        w = f // c
        i = 1
        while w.degree > 0:
            y = poly_gcd(w, c)
            fac = w // y
            if fac.degree > 0:
                out.append((fac, i))
            w, c = y, c // y
            i += 1
        if c.degree > 0:
            out.extend((g, e * p) for g, e in _squarefree(_pth_root(c)))
    else:
        out.extend((g, e * p) for g, e in _squarefree(_pth_root(f)))
    return out


def _distinct_degree(f: FpPoly) -> list[tuple[FpPoly, int]]:
    p = f.p
    out = []
    x = FpPoly.x(p)
    h = x % f
    i = 0
    while f.degree >= 2 * (i + 1):
        i += 1
        h = h.powmod(p, f)
        g = poly_gcd(f, h - x)
        if g.degree > 0:
            out.append((g, i))
            f = f // g
            h = h % f
    if f.degree > 0:
        out.append((f, f.degree))
    return out


def _equal_degree(f: FpPoly, d: int, rng: random.Random) -> list[FpPoly]:
    p = f.p
    if f.degree == d:
        return [f]
    while True:
        a = FpPoly(p, [rng.randrange(p) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        if p == 2:
            t, acc = a, a
            for _ in range(d - 1):
                t = t * t % f
                acc = acc + t
            g = poly_gcd(f, acc)
        else:
            g = poly_gcd(f, a.powmod((p**d - 1) // 2, f) - 1)
        if 0 < g.degree < f.degree:
            return _equal_degree(g, d, rng) + _equal_degree(f // g, d, rng)


def factor_poly_mod_p(f: FpPoly, seed: int = 0) -> list[tuple[FpPoly, int]]:
    """Monic irreducible factors with multiplicity, sorted by (degree, coeffs).

    Squarefree split, distinct-degree split, then Cantor-Zassenhaus driven by a
    PRNG seeded with ``seed`` so the output order is reproducible.
    """
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    f = f.monic()
    if f.degree < 1:
        return []
    rng = random.Random(seed)
    out = []
    for sqf, e in _squarefree(f):
        for block, d in _distinct_degree(sqf):
            for g in _equal_degree(block, d, rng):
                out.append((g.monic(), e))
    out.sort(key=lambda t: (t[0].degree, t[0].coeffs))
    return out


# ---------------------------------------------------------------------------
# Integer polynomials


def format_poly(coeffs: Sequence[int], var: str = "x") -> str:
    """Human-readable form of an integer polynomial given low degree first."""
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


def det_bareiss(m: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def sylvester(f: Sequence[int], g: Sequence[int]) -> list[list[int]]:
    """Sylvester matrix of f and g (coefficient lists, low degree first,
    formal degrees len-1)."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    fr, gr = list(reversed(f)), list(reversed(g))
    rows = []
    for i in range(n):
        rows.append([0] * i + fr + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gr + [0] * (size - n - 1 - i))
    return rows


def int_poly_discriminant(a: Sequence[int]) -> int:
    """Discriminant of sum a_i x^i with a_d != 0, via Res(f, f')/a_d."""
    d = len(a) - 1
    if a[d] == 0:
        raise ValueError("leading coefficient is zero")
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1
    deriv = [i * a[i] for i in range(1, d + 1)]
    res = det_bareiss(sylvester(a, deriv))
    q, r = divmod(res, a[d])
    if r:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return -q if (d * (d - 1) // 2) % 2 else q


def interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Integer-coefficient polynomial through the points (low degree first).

    Raises ArithmeticError if the interpolant is not integral.
    """
    n = len(xs)
    dd = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # coeffs <- coeffs * (x - xs[i]) + dd[i]
        new = [Fraction(0)] * n
        for k in range(n - 1):
            new[k + 1] += coeffs[k]
            new[k] -= coeffs[k] * xs[i]
        new[0] += dd[i]
        coeffs = new
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ArithmeticError("interpolant is not integral")
        out.append(int(c))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# Integer lattices


def hnf(m: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Row-style Hermite normal form.

    Rows span the same Z-module as the input rows; the output is in echelon
    form with positive pivots and the entries above each pivot reduced into
    [0, pivot). Zero rows are dropped, so a rank-deficient input yields fewer
    rows than columns (and the zero matrix yields ``()``).
    """
    a = [list(r) for r in m]
    if not a:
        return ()
    rows, cols = len(a), len(a[0])
    r = 0
    for j in range(cols):
        if r == rows:
            break
        for i in range(r + 1, rows):
            if a[i][j]:
                x, y = a[r][j], a[i][j]
                g, s, t = xgcd(x, y)
                u, v = x // g, y // g
                ar, ai = a[r], a[i]
                a[r] = [s * p + t * q for p, q in zip(ar, ai)]
                a[i] = [u * q - v * p for p, q in zip(ar, ai)]
        piv = a[r][j]
        if piv == 0:
            continue
        if piv < 0:
            a[r] = [-x for x in a[r]]
            piv = -piv
        for i in range(r):
            q = a[i][j] // piv
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return tuple(tuple(row) for row in a[:r])


def hnf_square(m: Sequence[Sequence[int]], dim: int) -> tuple[tuple[int, ...], ...]:
    """HNF that must have full rank ``dim``; raises RankDeficient otherwise."""
    h = hnf(m)
    if len(h) != dim:
        raise RankDeficient(f"lattice has rank {len(h)}, expected {dim}")
    return h


def solve_in_lattice(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """True iff v is an integer combination of the rows of a square HNF basis."""
    n = len(basis)
    if n == 0 or len(basis[0]) != n or any(basis[i][i] <= 0 for i in range(n)):
        raise RankDeficient("membership test needs a square full-rank HNF basis")
    v = list(v)
    for i in range(n):
        piv = basis[i][i]
        q, rem = divmod(v[i], piv)
        if rem:
            return False
        if q:
            row = basis[i]
            for k in range(i, n):
                v[k] -= q * row[k]
    return True


def lattice_member_mask(basis: np.ndarray, modulus: np.ndarray | int, x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`solve_in_lattice`.

    ``basis`` is (k, k) or (N, k, k); ``x`` is (N, k). ``modulus`` is a
    multiple-of-identity contained in the lattice (p**e for a prime power
    ideal), used to keep int64 intermediates bounded.
    """
    x = np.array(x, dtype=np.int64) % np.reshape(modulus, (-1, 1))
    n, k = x.shape
    ok = np.ones(n, dtype=bool)
    basis = np.asarray(basis, dtype=np.int64)
    mod = np.reshape(modulus, (-1, 1))
    for i in range(k):
        b = basis[..., i, :] if basis.ndim == 3 else np.broadcast_to(basis[i], (n, k))
        piv = b[:, i]
        q, rem = np.divmod(x[:, i], piv)
        ok &= rem == 0
        x = (x - q[:, None] * b) % mod
    return ok
