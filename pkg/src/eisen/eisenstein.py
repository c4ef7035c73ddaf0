"""Eisenstein and shifted Eisenstein predicates on coefficient tuples over o."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import LeadingCoefficientZero
from .intkernel import int_poly_discriminant, interpolate, poly_invmod
from .numberfield import (
    AlgebraicInteger,
    NumberField,
    PrimeIdealData,
    residue_representatives,
    valuation,
)

PLAIN = "plain"
SHIFTED = "shifted"
FLAVORS = (PLAIN, SHIFTED)


@dataclass(frozen=True)
class CoefficientTuple:
    """f(x) = sum coeffs[i] x^i with coeffs[0] the constant term."""

    field: NumberField
    coeffs: tuple[AlgebraicInteger, ...]

    def __post_init__(self):
        if len(self.coeffs) < 3:
            raise ValueError("need degree d >= 2")

    @classmethod
    def of(cls, field: NumberField, coeffs: Sequence) -> "CoefficientTuple":
        """Build from ints (degree-one fields) or coordinate tuples."""
        out = []
        for c in coeffs:
            if isinstance(c, AlgebraicInteger):
                out.append(c)
            else:
                out.append(field(c if isinstance(c, int) else tuple(c)))
        return cls(field, tuple(out))

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coords(self) -> tuple[tuple[int, ...], ...]:
        return tuple(c.coords for c in self.coeffs)

    def __repr__(self):
        return f"CoefficientTuple({list(self.coeffs)})"


@dataclass(frozen=True)
class EisensteinWitness:
    prime: PrimeIdealData
    shift: Optional[AlgebraicInteger] = None


def is_p_eisenstein(f: CoefficientTuple, P: PrimeIdealData) -> bool:
    """a_d not in P, a_0 ... a_{d-1} in P, a_0 not in P^2."""
    a = f.coeffs
    if P.contains(a[-1]):
        return False
    for c in a[1:-1]:
        if not P.contains(c):
            return False
    return valuation(P, a[0], 2) == 1


def shift_poly(f: CoefficientTuple, b: AlgebraicInteger | int) -> CoefficientTuple:
    """Coefficients of f(x + b): a_i' = sum_{j >= i} C(j, i) a_j b^(j-i).

    Evaluated as a Taylor shift (repeated synthetic division by x - b),
    which needs d(d+1)/2 multiplications by b.
    """
    F = f.field
    bc = (b,) + (0,) * (F.degree - 1) if isinstance(b, int) else b.coords
    mul = F.mul_coords
    c = [x.coords for x in f.coeffs]
    d = f.d
    if any(bc):
        for i in range(d):
            for j in range(d - 1, i - 1, -1):
                c[j] = tuple(u + v for u, v in zip(c[j], mul(bc, c[j + 1])))
    return CoefficientTuple(F, tuple(AlgebraicInteger(F, x) for x in c))


def _shift_by_scan(f: CoefficientTuple, P: PrimeIdealData, bound: int) -> Optional[EisensteinWitness]:
    for b in residue_representatives(P, bound):
        if is_p_eisenstein(shift_poly(f, b), P):
            return EisensteinWitness(P, b)
    return None


def is_shifted_p_eisenstein(
    f: CoefficientTuple, P: PrimeIdealData, bound: int = 10**6, scan: bool = False
) -> Optional[EisensteinWitness]:
    """Witness b (canonical residue representative) with f(x+b) P-Eisenstein, or None.

    Only b mod P matters, and at most one class can work. When p does not
    divide d that class is forced: f = a_d (x - b)^d mod P gives
    b = -a_{d-1} / (d a_d), so one check replaces the scan. ``scan=True``
    forces the residue-by-residue search.
    """
    a = f.coeffs
    if P.contains(a[-1]):
        return None
    d = f.d
    if scan or d % P.p == 0:
        return _shift_by_scan(f, P, bound)
    lead = P.residue(a[-1]) * d
    beta = (-P.residue(a[-2]) * poly_invmod(lead, P.g)) % P.g
    b = P.lift(beta)
    if is_p_eisenstein(shift_poly(f, b), P):
        return EisensteinWitness(P, b)
    return None


def discriminant(f: CoefficientTuple) -> AlgebraicInteger:
    """disc(f) = (-1)^{d(d-1)/2} Res(f, f') / a_d, as an element of o.

    Each coefficient is a polynomial in theta of degree < k, so disc is a
    polynomial in theta of degree <= (2d-2)(k-1). It is recovered exactly by
    evaluating theta at integer points (an integer Sylvester determinant with
    exact division at each point), interpolating, and reducing mod f.
    """
    F = f.field
    a = f.coeffs
    if not a[-1]:
        raise LeadingCoefficientZero("leading coefficient a_d is zero")
    k = F.degree
    cols = [c.coords for c in a]
    if k == 1:
        return F(int_poly_discriminant([c[0] for c in cols]))
    need = (2 * f.d - 2) * (k - 1) + 1
    xs, ys = [], []
    t = 0
    while len(xs) < need:
        vals = [sum(c[j] * t**j for j in range(k)) for c in cols]
        if vals[-1] != 0:
            xs.append(t)
            ys.append(int_poly_discriminant(vals))
        t = -t if t > 0 else -t + 1
    return F(F.reduce(interpolate(xs, ys)))


def candidate_primes_eisenstein(f: CoefficientTuple) -> list[PrimeIdealData]:
    """Primes dividing a_0: a superset of the primes P with f P-Eisenstein."""
    a0 = f.coeffs[0]
    if not a0:
        return []
    return f.field.primes_dividing(a0)


def candidate_primes_shifted(f: CoefficientTuple) -> list[PrimeIdealData]:
    """Primes dividing disc(f): a superset of those with f shifted P-Eisenstein."""
    if not f.coeffs[-1]:
        return []
    disc = discriminant(f)
    if not disc:
        return []
    return f.field.primes_dividing(disc)
