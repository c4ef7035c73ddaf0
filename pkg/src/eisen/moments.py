"""Local densities, Euler-product densities and moments of local-to-global
systems, with rigorous rational enclosures for the truncated tails.

All values are exact ``gmpy2.mpq`` rationals (they compare equal to
``fractions.Fraction``). A system truncated at M carries a tail model; the
infinite quantities are then reported as intervals [lo, hi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
from gmpy2 import mpq

from .eisenstein import FLAVORS, PLAIN, SHIFTED
from .errors import DensityZero, TailDiverges
from .intkernel import sieve
from .numberfield import NumberField, PrimeIdealData

# pi(x) < RS_CONST * x / log(x) for all x > 1 (Rosser-Schoenfeld 1962)
RS_CONST = Fraction("1.25506")
TAIL_SIEVE_FACTOR = 64
TAIL_SIEVE_CAP = 2 * 10**7

D2_NOTE = (
    "shifted Eisenstein, d = 2: the local densities sum to infinity, so the "
    "density is exactly 1 and no moment exists (the moment formulas do not extend to d = 2)"
)


def _tree(values: Sequence, op, empty):
    vals = list(values)
    if not vals:
        return empty
    while len(vals) > 1:
        nxt = [op(vals[i], vals[i + 1]) for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def tree_sum(values) -> mpq:
    return _tree(values, lambda a, b: a + b, mpq(0))


def tree_prod(values) -> mpq:
    return _tree(values, lambda a, b: a * b, mpq(1))


@lru_cache(maxsize=256)
def prime_tail_bound(M: int, t: int) -> Fraction:
    """Rational upper bound for the sum of p**-t over primes p > M (t >= 2).

    Primes in (M, L] are summed in floating point with a relative safety
    margin; beyond L partial summation with the Rosser-Schoenfeld bound on
    pi(x) gives  sum_{p > L} p**-t <= RS * t / (t - 1) / log(L) * L**(1 - t).
    """
    if t < 2:
        raise TailDiverges(f"sum of p^-{t} over primes diverges")
    M = max(int(M), 1)
    L = max(M, min(TAIL_SIEVE_FACTOR * M, TAIL_SIEVE_CAP), 16)
    ps = sieve(L)
    ps = ps[ps > M].astype(np.float64)
    explicit = Fraction(0)
    if ps.size:
        s = math.fsum(np.power(ps, -float(t)))
        explicit = Fraction(s) * (1 + Fraction(1, 10**9)) + Fraction(ps.size, 10**300)
    log_lower = Fraction(math.log(L)) - Fraction(1, 10**9)
    beyond = RS_CONST * t / ((t - 1) * log_lower) / Fraction(L) ** (t - 1)
    return explicit + beyond


@dataclass(frozen=True)
class EnclosedValue:
    """Rational interval [lo, hi] guaranteed to contain the exact value."""

    lo: mpq
    hi: mpq

    def __post_init__(self):
        object.__setattr__(self, "lo", mpq(self.lo))
        object.__setattr__(self, "hi", mpq(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x) -> "EnclosedValue":
        return cls(x, x)

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    @property
    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    @staticmethod
    def _wrap(x):
        return x if isinstance(x, EnclosedValue) else EnclosedValue.exact(x)

    def __add__(self, other):
        o = self._wrap(other)
        return EnclosedValue(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return EnclosedValue(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        o = self._wrap(other)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return EnclosedValue(min(c), max(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        if o.lo <= 0:
            raise DensityZero("divisor interval is not strictly positive")
        return self * EnclosedValue(1 / o.hi, 1 / o.lo)

    def __pow__(self, n: int):
        out = EnclosedValue.exact(1)
        for _ in range(n):
            out = out * self
        return out


@dataclass(frozen=True)
class DivergentDensity:
    """Density of a system whose local densities have an infinite sum: exactly 1.

    ``partial`` is 1 - prod(1 - s) over the finite entries, which increases to 1.
    """

    partial: mpq
    note: str = D2_NOTE
    value: int = 1


@dataclass(frozen=True)
class PartitionShape:
    """tau[j-1] = number of blocks of size j in a set partition of {1..n}."""

    tau: tuple[int, ...]
    count: int

    @property
    def n(self) -> int:
        return sum((j + 1) * t for j, t in enumerate(self.tau))

    @property
    def length(self) -> int:
        return sum(self.tau)


def _integer_partitions(n, largest=None):
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - part, part):
            yield (part,) + rest


@lru_cache(maxsize=None)
def partition_shapes(n: int) -> tuple[PartitionShape, ...]:
    """All block-size profiles tau of set partitions of {1..n}, with the number
    c(tau) = n! / prod_j (j!)^tau_j tau_j! of set partitions having that profile."""
    if not 1 <= n <= 20:
        raise ValueError("n must be in 1..20")
    out = []
    for parts in _integer_partitions(n):
        tau = [0] * n
        for part in parts:
            tau[part - 1] += 1
        c = math.factorial(n)
        for j, t in enumerate(tau, start=1):
            c //= math.factorial(j) ** t * math.factorial(t)
        out.append(PartitionShape(tuple(tau), c))
    return tuple(out)


def local_density(P: PrimeIdealData | int, d: int, flavor: str = PLAIN) -> mpq:
    """Haar measure of the local Eisenstein set at P: (N-1)^2 / N^(d+2);
    N times that for the shifted set."""
    if d < 2:
        raise ValueError("d must be >= 2")
    N = P if isinstance(P, int) else P.norm
    if flavor == PLAIN:
        return mpq((N - 1) ** 2, N ** (d + 2))
    if flavor == SHIFTED:
        return mpq((N - 1) ** 2, N ** (d + 1))
    raise ValueError(f"unknown flavor {flavor!r}")


@dataclass(frozen=True, eq=False)
class LocalDensitySystem:
    """Finite list of (label, s) plus a model of the neglected tail.

    With ``tail_exponent`` None the system is exactly the listed entries.
    Otherwise every prime above a rational p > ``cutoff`` has s <= p**-t with
    t = tail_exponent, and at most ``multiplicity`` primes lie above each p.
    """

    entries: tuple[tuple[object, mpq], ...]
    tail_exponent: Optional[int] = None
    cutoff: int = 0
    multiplicity: int = 1
    field: Optional[NumberField] = None
    d: Optional[int] = None
    flavor: Optional[str] = None

    def __post_init__(self):
        for label, s in self.entries:
            if not 0 < s < 1:
                raise ValueError(f"local density {s} for {label} is not in (0, 1)")

    @classmethod
    def from_values(cls, values: Iterable, labels: Optional[Sequence] = None) -> "LocalDensitySystem":
        vals = [mpq(v) for v in values]
        labels = list(labels) if labels is not None else list(range(len(vals)))
        return cls(tuple(zip(labels, vals)))

    @property
    def values(self) -> list[mpq]:
        return [s for _, s in self.entries]

    @property
    def diverges(self) -> bool:
        return self.tail_exponent is not None and self.tail_exponent < 2

    def power_sum(self, j: int) -> mpq:
        return self._power_sums(j)[j - 1]

    def _power_sums(self, upto: int) -> list[mpq]:
        cache = self.__dict__.setdefault("_ps_cache", [])
        if len(cache) < upto:
            vals = self.values
            for j in range(len(cache) + 1, upto + 1):
                cache.append(tree_sum([s**j for s in vals]))
        return cache

    def tail(self, j: int = 1) -> mpq:
        """Upper bound for the sum of s**j over the primes not listed."""
        if self.tail_exponent is None:
            return mpq(0)
        if self.tail_exponent * j < 2:
            raise TailDiverges(D2_NOTE if self.flavor == SHIFTED else "local densities do not have a finite sum")
        return mpq(self.multiplicity) * mpq(prime_tail_bound(self.cutoff, self.tail_exponent * j))

    def partial_density(self) -> mpq:
        return 1 - tree_prod([1 - s for s in self.values])


def build_system(F: NumberField, d: int, flavor: str, M: int) -> LocalDensitySystem:
    """Local densities of all primes above p <= M, ordered by (p, g)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if M < 1:
        raise ValueError("M must be >= 1")
    entries = tuple((P, local_density(P, d, flavor)) for P in F.primes_up_to(M))
    # plain: (N-1)^2/N^(d+2) < N^-d; shifted: < N^-(d-1)
    t = d if flavor == PLAIN else d - 1
    return LocalDensitySystem(entries, t, M, F.degree, F, d, flavor)


def density(sys: LocalDensitySystem) -> EnclosedValue | DivergentDensity:
    """1 - prod(1 - s). The tail factor lies in [1 - tail, 1]."""
    partial = sys.partial_density()
    if sys.diverges:
        return DivergentDensity(partial)
    rest = 1 - sys.tail(1)
    if rest < 0:
        rest = mpq(0)
    return EnclosedValue(partial, 1 - (1 - partial) * rest)


def mean(sys: LocalDensitySystem) -> EnclosedValue:
    lo = sys.power_sum(1)
    return EnclosedValue(lo, lo + sys.tail(1))


def elementary_symmetric(power_sums: Sequence[mpq], m: int) -> list[mpq]:
    """e_0 .. e_m from power sums p_1 .. p_m by Newton's identities."""
    e = [mpq(1)]
    for k in range(1, m + 1):
        acc = mpq(0)
        for i in range(1, k + 1):
            term = e[k - i] * power_sums[i - 1]
            acc += term if i % 2 else -term
        e.append(acc / k)
    return e


def nth_moment(sys: LocalDensitySystem, n: int) -> EnclosedValue:
    """sum over shapes tau of c(tau) * l! * e_l(s), l = number of blocks.

    The ordered sum over distinct l-tuples of prod s equals l! e_l. Tail per
    shape: l! c(tau) * tail(sum s) * (sum s + tail)^(l-1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tail = sys.tail(1)
    ps = sys._power_sums(n)
    e = elementary_symmetric(ps, n)
    full = ps[0] + tail
    lo = mpq(0)
    widen = mpq(0)
    for shape in partition_shapes(n):
        l = shape.length
        lf = math.factorial(l)
        lo += shape.count * lf * e[l]
        if tail:
            widen += lf * shape.count * tail * full ** (l - 1)
    return EnclosedValue(lo, lo + widen)


def variance(sys: LocalDensitySystem) -> EnclosedValue:
    """sum s - sum s^2 = sum s(1 - s); nonnegative terms, so lo is the partial sum."""
    lo = sys.power_sum(1) - sys.power_sum(2)
    return EnclosedValue(lo, lo + sys.tail(1))


def restricted_moment(sys: LocalDensitySystem, n: int, rho: EnclosedValue) -> EnclosedValue:
    """n-th moment restricted to the target set: mu_n / rho."""
    if rho.lo <= 0:
        raise DensityZero("density lower bound is not positive")
    mu_n = mean(sys) if n == 1 else nth_moment(sys, n)
    return mu_n / rho


def restricted_variance(
    sys: LocalDensitySystem, rho: EnclosedValue, mu: EnclosedValue, mu_T: EnclosedValue
) -> EnclosedValue:
    """rho^-1 (mu^2 - sum s^2 + mu) - 2 mu_T mu / rho + mu_T^2, in interval arithmetic."""
    if rho.lo <= 0:
        raise DensityZero("density lower bound is not positive")
    q = sys.power_sum(2)
    sq = EnclosedValue(q, q + sys.tail(2))
    return (mu * mu - sq + mu) / rho - 2 * mu_T * mu / rho + mu_T * mu_T


def central_moment(raw: Sequence[EnclosedValue], n: int) -> EnclosedValue:
    """sum_j C(n, j) (-mu)^(n-j) mu_j from raw moments raw[0] = mu_1, raw[1] = mu_2, ..."""
    mu = raw[0]
    out = EnclosedValue.exact(0)
    for j in range(n + 1):
        mj = EnclosedValue.exact(1) if j == 0 else raw[j - 1]
        out = out + math.comb(n, j) * (-mu) ** (n - j) * mj
    return out


# ---------------------------------------------------------------------------


@dataclass
class AnalyticReport:
    field: str
    d: int
    flavor: str
    M: int
    quantities: dict[str, EnclosedValue] = field(default_factory=dict)
    divergent: Optional[DivergentDensity] = None
    notes: list[str] = field(default_factory=list)


def analyze(F: NumberField, d: int, flavor: str, M: int, order: Optional[int] = 2) -> AnalyticReport:
    """Density, mean, restricted mean, moments 2..order, variance and
    restricted variance. ``order=None`` requests the density only."""
    sys = build_system(F, d, flavor, M)
    rep = AnalyticReport(str(F), d, flavor, M)
    rho = density(sys)
    if isinstance(rho, DivergentDensity):
        rep.divergent = rho
        rep.notes.append(rho.note)
        if order is not None:
            raise TailDiverges(D2_NOTE)
        return rep
    rep.quantities["density"] = rho
    if order is None:
        return rep
    mu = mean(sys)
    rep.quantities["mean"] = mu
    moments = {j: nth_moment(sys, j) for j in range(2, order + 1)}
    for j, m in moments.items():
        rep.quantities[f"moment_{j}"] = m
    rep.quantities["variance"] = variance(sys)
    if rho.lo > 0:
        mu_T = mu / rho
        rep.quantities["restricted_mean"] = mu_T
        for j, m in moments.items():
            rep.quantities[f"restricted_moment_{j}"] = m / rho
        rep.quantities["restricted_variance"] = restricted_variance(sys, rho, mu, mu_T)
    else:
        rep.notes.append("restricted quantities omitted: density lower bound is 0")
    return rep
