"""Arithmetic in o = Z[theta] for a monogenic number field, prime splitting by
Dedekind's theorem, and ideals as integer lattices in HNF."""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import FieldRejected, NotMaximalAtP, ParseError, RankDeficient, ResidueFieldTooLarge
from .intkernel import (
    DEFAULT_FACTOR_CONFIG,
    FactorConfig,
    FpPoly,
    det_bareiss,
    factor_integer,
    factor_poly_mod_p,
    format_poly,
    hnf,
    hnf_square,
    int_poly_discriminant,
    is_prime,
    sieve,
    solve_in_lattice,
)

log = logging.getLogger(__name__)

DEFAULT_RESIDUE_BOUND = 10**6
POWER_CACHE_CAP = 4

_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*(x(?:\s*\^\s*(\d+))?)?\s*")


def parse_polynomial(text: str) -> tuple[int, ...]:
    """Parse an integer polynomial in x, e.g. ``"x^3 - x - 1"`` or ``"2x^2+3"``.

    Returns coefficients low degree first. Repeated degrees are summed.
    """
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    pos = 0
    coeffs: dict[int, int] = {}
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, mono, exp = m.groups()
        if m.end() == pos or (not num and not mono):
            raise ParseError(f"cannot parse polynomial {text!r} at position {pos}")
        if not first and not sign:
            raise ParseError(f"missing '+' or '-' in {text!r} at position {pos}")
        first = False
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        deg = (int(exp) if exp is not None else 1) if mono else 0
        coeffs[deg] = coeffs.get(deg, 0) + c
        pos = m.end()
    top = max((d for d, c in coeffs.items() if c), default=0)
    return tuple(coeffs.get(i, 0) for i in range(top + 1))


def read_field_descriptor(path: str | Path) -> tuple[int, ...]:
    """Read a descriptor file containing a line ``f = <polynomial>``.

    Blank lines and lines starting with ``#`` are ignored.
    """
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rhs = line.partition("=")
        if not sep or key.strip() != "f":
            raise ParseError(f"expected 'f = <polynomial>', got {line!r}")
        return parse_polynomial(rhs)
    raise ParseError(f"no 'f = ...' line in {path}")


def _possible_degrees(degrees: Sequence[int]) -> set[int]:
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums}
    return sums


def _check_irreducible(poly: tuple[int, ...], disc: int) -> bool:
    """Reject reducible f found cheaply; return True when irreducibility is proved.

    Uses a rational-root test plus factor-degree patterns modulo small good
    primes.
    """
    k = len(poly) - 1
    if k == 1:
        return True
    c0 = poly[0]
    if c0 == 0:
        raise FieldRejected(f"{format_poly(poly)} is divisible by x")
    try:
        fac = factor_integer(c0)
    except Exception:  # huge constant term: skip the root test
        fac = None
    if fac is not None:
        primes = [p for p, _ in fac]
        exps = [e for _, e in fac]
        for combo in itertools.product(*(range(e + 1) for e in exps)):
            r = 1
            for p, e in zip(primes, combo):
                r *= p**e
            for cand in (r, -r):
                if sum(c * cand**i for i, c in enumerate(poly)) == 0:
                    raise FieldRejected(f"{format_poly(poly)} has rational root {cand}")
        if k <= 3:
            return True
    allowed = set(range(1, k))
    for p in sieve(2000):
        p = int(p)
        if disc % p == 0:
            continue
        degs = []
        for g, e in factor_poly_mod_p(FpPoly(p, poly)):
            degs.extend([g.degree] * e)
        allowed &= _possible_degrees(degs)
        if not allowed:
            return True
    return False


class NumberField:
    """K = Q(theta), theta a root of the monic irreducible integer polynomial f.

    ``o`` is assumed to equal Z[theta]; this is verified prime by prime when
    splitting (see :meth:`split_prime`).
    """

    def __init__(self, poly: Sequence[int] | str, factor_config: FactorConfig = DEFAULT_FACTOR_CONFIG):
        if isinstance(poly, str):
            poly = parse_polynomial(poly)
        poly = tuple(int(c) for c in poly)
        while len(poly) > 1 and poly[-1] == 0:
            poly = poly[:-1]
        if len(poly) < 2:
            raise ParseError("defining polynomial must have degree >= 1")
        if poly[-1] != 1:
            raise FieldRejected(f"defining polynomial {format_poly(poly)} is not monic")
        self.poly = poly
        self.degree = len(poly) - 1
        self.factor_config = factor_config
        self.disc = int_poly_discriminant(poly)
        if self.disc == 0:
            raise FieldRejected(f"{format_poly(poly)} has a repeated root")
        self.irreducibility_certified = _check_irreducible(poly, self.disc)
        if not self.irreducibility_certified:
            log.warning("could not certify irreducibility of %s", format_poly(poly))
        self._split_cache: dict[int, tuple[PrimeIdealData, ...]] = {}
        k = self.degree
        # theta^m in the power basis, for m < 2k - 1
        red = []
        for m in range(2 * k - 1):
            if m < k:
                v = [0] * k
                v[m] = 1
            else:
                prev = red[m - 1]
                top = prev[k - 1]
                v = [0] + list(prev[: k - 1])
                for i in range(k):
                    v[i] -= top * poly[i]
            red.append(tuple(v))
        self._powers = tuple(red)

    @classmethod
    def from_descriptor(cls, path: str | Path) -> "NumberField":
        return cls(read_field_descriptor(path))

    def __repr__(self):
        return f"NumberField({format_poly(self.poly)!r})"

    def __str__(self):
        return format_poly(self.poly)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __getstate__(self):
        return {"poly": self.poly}

    def __setstate__(self, state):
        self.__init__(state["poly"])

    # elements -------------------------------------------------------------

    def __call__(self, coords: Iterable[int] | int) -> "AlgebraicInteger":
        if isinstance(coords, int):
            coords = (coords,) + (0,) * (self.degree - 1)
        return AlgebraicInteger(self, tuple(coords))

    @property
    def zero(self) -> "AlgebraicInteger":
        return self(0)

    @property
    def one(self) -> "AlgebraicInteger":
        return self(1)

    @property
    def theta(self) -> "AlgebraicInteger":
        if self.degree == 1:
            return self(-self.poly[0])
        return self((0, 1) + (0,) * (self.degree - 2))

    def reduce(self, poly: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of sum poly[m] theta^m in the power basis."""
        k = self.degree
        out = [0] * k
        powers = self._powers
        for m, c in enumerate(poly):
            if not c:
                continue
            if m >= len(powers):
                # rare: long polynomials (e.g. discriminants); extend on the fly
                return self._reduce_long(poly)
            for i, v in enumerate(powers[m]):
                if v:
                    out[i] += c * v
        return tuple(out)

    def _reduce_long(self, poly):
        k = self.degree
        r = list(poly)
        for m in range(len(r) - 1, k - 1, -1):
            top = r[m]
            if top:
                r[m] = 0
                for i in range(k):
                    r[m - k + i] -= top * self.poly[i]
        return tuple(r[:k]) + (0,) * max(0, k - len(r))

    def mul_coords(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        k = self.degree
        if k == 1:
            return (a[0] * b[0],)
        conv = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    conv[i + j] += x * y
        return self.reduce(conv)

    def mult_matrix(self, a: "AlgebraicInteger") -> list[list[int]]:
        """Matrix of x -> a*x; column j holds the coordinates of a*theta^j."""
        k = self.degree
        cols = []
        for j in range(k):
            e = [0] * k
            e[j] = 1
            cols.append(self.mul_coords(a.coords, e))
        return [[cols[j][i] for j in range(k)] for i in range(k)]

    # primes ---------------------------------------------------------------

    def is_p_maximal(self, p: int, factors=None) -> bool:
        """Dedekind's criterion for Z[theta] at p."""
        if self.disc % p:
            return True
        if factors is None:
            factors = factor_poly_mod_p(FpPoly(p, self.poly))
        prod = (1,)
        for g, e in factors:
            for _ in range(e):
                prod = _int_poly_mul(prod, g.coeffs)
        diff = [a - b for a, b in itertools.zip_longest(self.poly, prod, fillvalue=0)]
        if any(c % p for c in diff):
            raise ArithmeticError("factorization mod p does not reproduce f")
        rem = FpPoly(p, [c // p for c in diff])
        return all(e < 2 or rem % g for g, e in factors)

    def split_prime(self, p: int) -> tuple["PrimeIdealData", ...]:
        """Primes above p, via the factorization of f mod p, sorted by g."""
        cached = self._split_cache.get(p)
        if cached is not None:
            return cached
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        factors = factor_poly_mod_p(FpPoly(p, self.poly))
        if not self.is_p_maximal(p, factors):
            raise NotMaximalAtP(p, format_poly(self.poly))
        if sum(e * g.degree for g, e in factors) != self.degree:
            raise FieldRejected(f"inconsistent splitting at {p}; is f reducible?")
        out = tuple(
            sorted(
                (PrimeIdealData(self, p, g, e) for g, e in factors),
                key=lambda P: P.g.coeffs,
            )
        )
        self._split_cache[p] = out
        return out

    def primes_up_to(self, bound: int) -> list["PrimeIdealData"]:
        """All prime ideals above rational primes p <= bound, ordered by (p, g)."""
        out = []
        for p in sieve(bound):
            out.extend(self.split_prime(int(p)))
        return out

    def primes_dividing(self, x: "AlgebraicInteger") -> list["PrimeIdealData"]:
        """Prime ideals containing the nonzero element x."""
        n = field_norm(x)
        if n == 0:
            raise ValueError("zero is contained in every prime")
        out = []
        for p, _ in factor_integer(n, self.factor_config):
            out.extend(P for P in self.split_prime(p) if P.contains(x))
        return out


def _int_poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


class AlgebraicInteger:
    """Element of o given by its coordinates in the power basis 1, theta, ..."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: tuple[int, ...]):
        if len(coords) != field.degree:
            raise ValueError(f"expected {field.degree} coordinates, got {len(coords)}")
        self.field = field
        self.coords = coords

    def _lift(self, other):
        if isinstance(other, AlgebraicInteger):
            return other.coords
        if isinstance(other, int):
            return (other,) + (0,) * (self.field.degree - 1)
        return None

    def __add__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return AlgebraicInteger(self.field, tuple(x + y for x, y in zip(self.coords, b)))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return AlgebraicInteger(self.field, tuple(x - y for x, y in zip(self.coords, b)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AlgebraicInteger(self.field, tuple(-x for x in self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            return AlgebraicInteger(self.field, tuple(other * x for x in self.coords))
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return AlgebraicInteger(self.field, self.field.mul_coords(self.coords, b))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return self.coords == b

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        if self.field.degree == 1:
            return str(self.coords[0])
        return f"[{', '.join(map(str, self.coords))}]"

    def exact_div(self, other: "AlgebraicInteger | int") -> "AlgebraicInteger":
        """self / other, which must lie in o."""
        if isinstance(other, int):
            other = self.field(other)
        k = self.field.degree
        m = [[Fraction(x) for x in row] + [Fraction(self.coords[i])] for i, row in enumerate(self.field.mult_matrix(other))]
        for c in range(k):
            piv = next((r for r in range(c, k) if m[r][c]), None)
            if piv is None:
                raise ZeroDivisionError("division by zero in o")
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [x * inv for x in m[c]]
            for r in range(k):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [x - f * y for x, y in zip(m[r], m[c])]
        out = []
        for r in range(k):
            q = m[r][k]
            if q.denominator != 1:
                raise ArithmeticError("quotient is not an algebraic integer")
            out.append(int(q))
        return AlgebraicInteger(self.field, tuple(out))


def nf_add(a: AlgebraicInteger, b: AlgebraicInteger) -> AlgebraicInteger:
    return a + b


def nf_mul(a: AlgebraicInteger, b: AlgebraicInteger) -> AlgebraicInteger:
    return a * b


def field_norm(a: AlgebraicInteger) -> int:
    """N_{K/Q}(a) as the determinant of multiplication by a."""
    if a.field.degree == 1:
        return a.coords[0]
    return det_bareiss(a.field.mult_matrix(a))


# ---------------------------------------------------------------------------
# Ideals


@dataclass(frozen=True, eq=False)
class IdealLattice:
    """Nonzero ideal of o as a full-rank Z-lattice in HNF (rows = basis)."""

    field: NumberField
    hnf_basis: tuple[tuple[int, ...], ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        k = self.field.degree
        if len(self.hnf_basis) != k or any(len(r) != k for r in self.hnf_basis):
            raise RankDeficient("ideal basis must be k x k")
        if self.check:
            theta = self.field.theta
            for row in self.hnf_basis:
                if not self.contains(AlgebraicInteger(self.field, row) * theta):
                    raise ValueError("lattice is not closed under multiplication by theta")

    @classmethod
    def from_generators(cls, field: NumberField, gens: Iterable[AlgebraicInteger]) -> "IdealLattice":
        """Ideal generated (as an o-module) by gens."""
        rows = []
        k = field.degree
        for g in gens:
            for j in range(k):
                e = [0] * k
                e[j] = 1
                rows.append(field.mul_coords(g.coords, e))
        return cls(field, hnf_square(rows, k), check=False)

    @classmethod
    def unit(cls, field: NumberField) -> "IdealLattice":
        return cls.from_generators(field, [field.one])

    @cached_property
    def norm(self) -> int:
        n = 1
        for i, row in enumerate(self.hnf_basis):
            n *= row[i]
        return n

    def contains(self, x: AlgebraicInteger) -> bool:
        return solve_in_lattice(self.hnf_basis, x.coords)

    def __eq__(self, other):
        return isinstance(other, IdealLattice) and self.field == other.field and self.hnf_basis == other.hnf_basis

    def __hash__(self):
        return hash(self.hnf_basis)

    def __mul__(self, other: "IdealLattice") -> "IdealLattice":
        return ideal_mul(self, other)

    def __add__(self, other: "IdealLattice") -> "IdealLattice":
        return IdealLattice(self.field, hnf_square(self.hnf_basis + other.hnf_basis, self.field.degree), check=False)


def ideal_mul(a: IdealLattice, b: IdealLattice) -> IdealLattice:
    F = a.field
    rows = [F.mul_coords(x, y) for x in a.hnf_basis for y in b.hnf_basis]
    return IdealLattice(F, hnf_square(rows, F.degree), check=False)


def ideal_contains(a: IdealLattice, x: AlgebraicInteger) -> bool:
    return a.contains(x)


class PrimeIdealData:
    """The prime ideal (p, g(theta)) for an irreducible factor g of f mod p.

    ``e`` is the exponent of g in f mod p (the ramification index) and
    ``residue_degree`` the degree of g. The residue field o/P is F_p[t]/(g).
    """

    __slots__ = ("field", "p", "g", "e", "residue_degree", "norm", "hnf_basis", "_powers", "__weakref__")

    def __init__(self, field: NumberField, p: int, g: FpPoly, e: int):
        self.field = field
        self.p = p
        self.g = g
        self.e = e
        self.residue_degree = g.degree
        self.norm = p**g.degree
        k = field.degree
        gens = [field(p), field(field.reduce(g.coeffs))]
        lat = IdealLattice.from_generators(field, gens)
        self.hnf_basis = lat.hnf_basis
        self._powers = {1: lat}

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.p, self.g.coeffs)

    def __eq__(self, other):
        return isinstance(other, PrimeIdealData) and self.field == other.field and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"P({self.p}, {self.g})"

    def describe(self) -> str:
        return f"({self.p}, {format_poly(self.g.coeffs, 'theta')})" if self.field.degree > 1 else f"({self.p})"

    def residue(self, x: AlgebraicInteger) -> FpPoly:
        """Image of x in o/P = F_p[t]/(g)."""
        return FpPoly(self.p, x.coords) % self.g

    def contains(self, x: AlgebraicInteger) -> bool:
        return not self.residue(x)

    def lift(self, r: FpPoly) -> AlgebraicInteger:
        """Canonical representative of a residue class (coords in [0, p))."""
        c = list(r.coeffs) + [0] * (self.field.degree - len(r.coeffs))
        return AlgebraicInteger(self.field, tuple(c))

    def power(self, n: int) -> IdealLattice:
        """P**n as a lattice (n >= 1); cached."""
        lat = self._powers.get(n)
        if lat is None:
            lat = ideal_mul(self.power(n - 1), self._powers[1])
            self._powers[n] = lat
        return lat

    @property
    def lattice(self) -> IdealLattice:
        return self._powers[1]


def valuation(P: PrimeIdealData, x: AlgebraicInteger, cap: int = POWER_CACHE_CAP) -> int:
    """Largest v <= cap with x in P**v. A return value of ``cap`` means "at least cap"."""
    if not x:
        return cap
    v = 0
    if v < cap and P.contains(x):
        v = 1
        while v < cap and P.power(v + 1).contains(x):
            v += 1
    return v


def residue_representatives(P: PrimeIdealData, bound: int = DEFAULT_RESIDUE_BOUND) -> list[AlgebraicInteger]:
    """A complete residue system of o/P, lexicographic in coordinates."""
    if P.norm > bound:
        raise ResidueFieldTooLarge(f"N(P) = {P.norm} exceeds enumeration bound {bound}")
    k = P.field.degree
    f = P.residue_degree
    pad = (0,) * (k - f)
    return [AlgebraicInteger(P.field, c + pad) for c in itertools.product(range(P.p), repeat=f)]


def split_prime(F: NumberField, p: int) -> tuple[PrimeIdealData, ...]:
    return F.split_prime(p)


def primes_up_to(F: NumberField, bound: int) -> list[PrimeIdealData]:
    return F.primes_up_to(bound)
