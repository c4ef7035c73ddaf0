"""Ground-truth counts over coefficient boxes O(H)^(d+1).

A box coordinate runs over [-H, H) in each of the k power-basis coordinates
of each of the d + 1 coefficients, so a box holds (2H)^(k(d+1)) tuples.
Every scan accumulates exact integer power sums of the witness count w(f);
ratios are formed only when a report is read.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np
from gmpy2 import mpq

from .eisenstein import (
    FLAVORS,
    PLAIN,
    SHIFTED,
    CoefficientTuple,
    EisensteinWitness,
    candidate_primes_eisenstein,
    candidate_primes_shifted,
    is_p_eisenstein,
    is_shifted_p_eisenstein,
)
from .errors import BudgetExceeded
from .intkernel import lattice_member_mask
from .numberfield import AlgebraicInteger, NumberField, PrimeIdealData, valuation

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 * 10**8
DEFAULT_SEED = 20240917
CHUNK = 1 << 16
EXHAUSTIVE = "exhaustive"
MONTECARLO = "montecarlo"


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("EISEN_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


@dataclass(frozen=True)
class BoxSpec:
    field: NumberField
    H: int
    d: int

    def __post_init__(self):
        if self.H < 1:
            raise ValueError("H must be >= 1")
        if self.d < 2:
            raise ValueError("d must be >= 2")

    @property
    def dims(self) -> int:
        return self.d + 1

    @property
    def side(self) -> int:
        """Number of box elements of o: (2H)^k."""
        return (2 * self.H) ** self.field.degree

    @property
    def size(self) -> int:
        return self.side**self.dims

    def points(self) -> np.ndarray:
        """All box elements as a (side, k) coordinate array, odometer order."""
        k = self.field.degree
        rng = range(-self.H, self.H)
        return np.array(list(itertools.product(rng, repeat=k)), dtype=np.int64).reshape(-1, k)


@dataclass(frozen=True)
class Estimate:
    value: Fraction
    standard_error: Optional[float] = None

    def __float__(self):
        return float(self.value)


@dataclass
class EmpiricalReport:
    """Exact integer accumulators of one scan.

    ``power_sums[j-1]`` is the sum of w(f)^j over the scanned tuples; since
    w = 0 off the target set, the same sums restrict to the target.
    """

    field: str
    d: int
    flavor: str
    H: int
    mode: str
    order: int
    total: int
    in_target: int
    power_sums: tuple[int, ...]
    samples: Optional[int] = None
    seed: Optional[int] = None
    method: str = ""

    def __post_init__(self):
        if not 0 <= self.in_target <= self.total:
            raise ValueError("in_target out of range")

    def _S(self, j: int) -> int:
        return self.in_target if j == 0 else self.power_sums[j - 1]

    def _se(self, n: int, s1: int, s2: int) -> Optional[float]:
        if self.mode != MONTECARLO:
            return None
        if n < 2:
            return math.inf
        var = Fraction(s2 * n - s1 * s1, n * (n - 1))
        return math.sqrt(max(float(var), 0.0) / n)

    def _variance_se(self, n: int, sums: Sequence[int]) -> Optional[float]:
        """Delta method: Var(sample variance) ~ (m4 - sigma^4) / n."""
        if self.mode != MONTECARLO:
            return None
        if n < 2:
            return math.inf
        m = [Fraction(s, n) for s in sums]  # raw moments 1..4
        mu = m[0]
        var = m[1] - mu * mu
        m4 = m[3] - 4 * m[2] * mu + 6 * m[1] * mu**2 - 3 * mu**4
        return math.sqrt(max(float(m4 - var * var), 0.0) / n)

    def quantities(self) -> dict[str, Estimate]:
        """Empirical counterparts of the analytic quantities, keyed alike."""
        N, T = self.total, self.in_target
        out = {"density": Estimate(Fraction(T, N), self._se(N, T, T))}
        out["mean"] = Estimate(Fraction(self._S(1), N), self._se(N, self._S(1), self._S(2)))
        for j in range(2, self.order + 1):
            out[f"moment_{j}"] = Estimate(Fraction(self._S(j), N), self._se(N, self._S(j), self._S(2 * j)))
        sums = [self._S(j) for j in range(1, 5)]
        out["variance"] = Estimate(
            Fraction(sums[1], N) - Fraction(sums[0], N) ** 2, self._variance_se(N, sums)
        )
        if T > 0:
            out["restricted_mean"] = Estimate(Fraction(sums[0], T), self._se(T, sums[0], sums[1]))
            for j in range(2, self.order + 1):
                out[f"restricted_moment_{j}"] = Estimate(
                    Fraction(self._S(j), T), self._se(T, self._S(j), self._S(2 * j))
                )
            out["restricted_variance"] = Estimate(
                Fraction(sums[1], T) - Fraction(sums[0], T) ** 2, self._variance_se(T, sums)
            )
        return out


def _sums_order(order: int) -> int:
    return max(2 * order, 4)


def _accumulate(hist: Mapping[int, int], upto: int) -> tuple[int, int, list[int]]:
    """(count, in_target, power sums) from a histogram w -> multiplicity."""
    total = sum(hist.values())
    target = sum(c for w, c in hist.items() if w > 0)
    sums = [sum(c * w**j for w, c in hist.items()) for j in range(1, upto + 1)]
    return total, target, sums


# ---------------------------------------------------------------------------
# witnesses


def witness_count(f: CoefficientTuple, flavor: str = PLAIN) -> tuple[int, list[EisensteinWitness]]:
    """Number of primes P at which f is (shifted) P-Eisenstein, with witnesses.

    Only candidate primes are examined; they contain every possible witness,
    so the count is exact.
    """
    if flavor == PLAIN:
        wits = [EisensteinWitness(P) for P in candidate_primes_eisenstein(f) if is_p_eisenstein(f, P)]
    elif flavor == SHIFTED:
        wits = []
        for P in candidate_primes_shifted(f):
            w = is_shifted_p_eisenstein(f, P)
            if w is not None:
                wits.append(w)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return len(wits), wits


def exact_valuation_one(F: NumberField, a0: AlgebraicInteger) -> tuple[PrimeIdealData, ...]:
    """Primes P with v_P(a0) = 1: the only primes that can witness a plain
    Eisenstein tuple with constant term a0."""
    if not a0:
        return ()
    return tuple(P for P in F.primes_dividing(a0) if valuation(P, a0, 2) == 1)


def prime_box_count(box: BoxSpec, P: PrimeIdealData) -> int:
    """Number of P-Eisenstein tuples in the box, by direct residue counting."""
    F = box.field
    inside = outside = exact_one = 0
    P2 = P.power(2)
    for c in itertools.product(range(-box.H, box.H), repeat=F.degree):
        x = F(c)
        if P.contains(x):
            inside += 1
            if not P2.contains(x):
                exact_one += 1
        else:
            outside += 1
    return exact_one * inside ** (box.d - 1) * outside


# ---------------------------------------------------------------------------
# exhaustive


def _check_budget(box: BoxSpec, budget: int):
    if box.size > budget:
        raise BudgetExceeded(f"box has {box.size} tuples, budget is {budget}")


def _factored_histogram(box: BoxSpec) -> dict[int, int]:
    """Exact histogram of w over the box for the plain flavor.

    For fixed a0 with candidate set C, and S a subset of C, the number of
    (a_1..a_d) meeting the conditions at every prime of S factorizes as
    in(S)^(d-1) * out(S), where in(S) counts box elements in all of S and
    out(S) those in none. Moebius inversion over subsets turns these into the
    number of tuples whose witness set is exactly S.
    """
    F = box.field
    pts = box.points()
    per_a0_rest = box.side**box.d
    masks: dict[PrimeIdealData, np.ndarray] = {}
    groups: dict[tuple[PrimeIdealData, ...], int] = {}
    for c in pts:
        C = exact_valuation_one(F, F(tuple(int(v) for v in c)))
        groups[C] = groups.get(C, 0) + 1
        for P in C:
            if P not in masks:
                masks[P] = lattice_member_mask(P.hnf_basis, P.p, pts)
    hist: dict[int, int] = {}
    for C, mult in groups.items():
        m = len(C)
        subsets = range(1 << m)
        inA = []
        for T in subsets:
            mask = np.ones(len(pts), dtype=bool)
            for i in range(m):
                if T >> i & 1:
                    mask &= masks[C[i]]
            inA.append(int(mask.sum()))
        G = []
        for S in subsets:
            out = 0
            T = S
            while True:  # subsets T of S
                out += (-1) ** bin(T).count("1") * inA[T]
                if T == 0:
                    break
                T = (T - 1) & S
            G.append(inA[S] ** (box.d - 1) * out)
        full = (1 << m) - 1
        for S in subsets:
            h = 0
            rest = full & ~S
            U = rest
            while True:  # supersets S | U
                h += (-1) ** bin(U).count("1") * G[S | U]
                if U == 0:
                    break
                U = (U - 1) & rest
            if h:
                w = bin(S).count("1")
                hist[w] = hist.get(w, 0) + h * mult
        assert G[0] == per_a0_rest
    return hist


def _naive_slice(args) -> dict[int, int]:
    poly, H, d, flavor, a0_rows = args
    F = NumberField(poly)
    rng = range(-H, H)
    rest_pts = [F(c) for c in itertools.product(rng, repeat=F.degree)]
    hist: dict[int, int] = {}
    for c0 in a0_rows:
        a0 = F(tuple(c0))
        for rest in itertools.product(rest_pts, repeat=d):
            w, _ = witness_count(CoefficientTuple(F, (a0,) + rest), flavor)
            hist[w] = hist.get(w, 0) + 1
    return hist


def _merge(hists) -> dict[int, int]:
    out: dict[int, int] = {}
    for h in hists:
        for w, c in h.items():
            out[w] = out.get(w, 0) + c
    return out


def exhaustive_scan(
    box: BoxSpec,
    flavor: str = PLAIN,
    max_order: int = 2,
    budget: int = DEFAULT_BUDGET,
    threads: Optional[int] = None,
    method: str = "auto",
) -> EmpiricalReport:
    """Exact witness-count power sums over every tuple of the box.

    ``method="factored"`` (plain only) counts by a product formula per
    constant-term slice; ``"naive"`` evaluates w(f) tuple by tuple, slices
    of a0 being spread over worker processes. ``"auto"`` picks factored for
    the plain flavor.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    _check_budget(box, budget)
    if method == "auto":
        method = "factored" if flavor == PLAIN else "naive"
    if method == "factored":
        if flavor != PLAIN:
            raise ValueError("factored counting is only available for the plain flavor")
        hist = _factored_histogram(box)
    elif method == "naive":
        rows = [tuple(int(v) for v in c) for c in box.points()]
        n = resolve_threads(threads)
        parts = [rows[i::n] for i in range(n)] if n > 1 else [rows]
        jobs = [(box.field.poly, box.H, box.d, flavor, part) for part in parts if part]
        if n > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=n) as ex:
                hist = _merge(ex.map(_naive_slice, jobs))
        else:
            hist = _merge(map(_naive_slice, jobs))
    else:
        raise ValueError(f"unknown method {method!r}")
    total, target, sums = _accumulate(hist, _sums_order(max_order))
    assert total == box.size
    return EmpiricalReport(
        str(box.field), box.d, flavor, box.H, EXHAUSTIVE, max_order, total, target, tuple(sums), method=method
    )


# ---------------------------------------------------------------------------
# Monte Carlo


class _CandidateIndex:
    """Per-process cache: a0 code -> indices of primes with v_P(a0) = 1."""

    def __init__(self, F: NumberField, H: int):
        self.F = F
        self.H = H
        self.by_code: dict[int, tuple[int, ...]] = {}
        self.primes: list[PrimeIdealData] = []
        self.slot: dict[PrimeIdealData, int] = {}
        self._arrays = None

    def decode(self, code: int) -> tuple[int, ...]:
        side = 2 * self.H
        out = []
        for _ in range(self.F.degree):
            code, r = divmod(code, side)
            out.append(r - self.H)
        return tuple(out)

    def lookup(self, code: int) -> tuple[int, ...]:
        hit = self.by_code.get(code)
        if hit is None:
            idx = []
            for P in exact_valuation_one(self.F, self.F(self.decode(code))):
                if P not in self.slot:
                    self.slot[P] = len(self.primes)
                    self.primes.append(P)
                    self._arrays = None
                idx.append(self.slot[P])
            hit = self.by_code[code] = tuple(idx)
        return hit

    def arrays(self):
        if self._arrays is None:
            k = self.F.degree
            bases = np.array([P.hnf_basis for P in self.primes], dtype=np.int64).reshape(-1, k, k)
            mods = np.array([P.p for P in self.primes], dtype=np.int64)
            self._arrays = (bases, mods)
        return self._arrays


_INDEX_CACHE: dict[tuple, _CandidateIndex] = {}


def _index_for(F: NumberField, H: int) -> _CandidateIndex:
    key = (F.poly, H)
    if key not in _INDEX_CACHE:
        _INDEX_CACHE[key] = _CandidateIndex(F, H)
    return _INDEX_CACHE[key]


def chunk_generator(seed: int, i: int) -> np.random.Generator:
    """Stream of chunk i: Philox-4x64 keyed by the seed, jumped i times (2^128 draws each)."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(i))


def draw_chunk(box: BoxSpec, seed: int, i: int, n: int) -> np.ndarray:
    """(n, d+1, k) coordinates of chunk i; a0 is coefficient 0."""
    rng = chunk_generator(seed, i)
    return rng.integers(-box.H, box.H, size=(n, box.dims, box.field.degree), dtype=np.int64)


def plain_witness_counts(box: BoxSpec, X: np.ndarray) -> np.ndarray:
    """Vectorized plain witness counts for sampled tuples X of shape (n, d+1, k)."""
    n = X.shape[0]
    F, H, k, d = box.field, box.H, box.field.degree, box.d
    idx = _index_for(F, H)
    side = 2 * H
    weights = side ** np.arange(k, dtype=np.int64)
    codes = (X[:, 0, :] + H) @ weights
    uniq, inv = np.unique(codes, return_inverse=True)
    lists = [idx.lookup(int(u)) for u in uniq]
    lens = np.array([len(c) for c in lists], dtype=np.int64)
    flat = np.array([p for c in lists for p in c], dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(lens)[:-1]))
    cnt = lens[inv]
    total = int(cnt.sum())
    if total == 0:
        return np.zeros(n, dtype=np.int64)
    si = np.repeat(np.arange(n), cnt)
    first = np.repeat(np.cumsum(cnt) - cnt, cnt)
    pi = flat[np.repeat(starts[inv], cnt) + np.arange(total) - first]
    bases, mods = idx.arrays()
    B, mod = bases[pi], mods[pi]
    ok = ~lattice_member_mask(B, mod, X[si, d, :])
    for j in range(1, d):
        ok &= lattice_member_mask(B, mod, X[si, j, :])
    return np.bincount(si[ok], minlength=n)


def _generic_witness_counts(box: BoxSpec, X: np.ndarray, flavor: str) -> np.ndarray:
    F = box.field
    out = np.zeros(X.shape[0], dtype=np.int64)
    for r in range(X.shape[0]):
        coeffs = tuple(F(tuple(int(v) for v in X[r, j])) for j in range(box.dims))
        out[r], _ = witness_count(CoefficientTuple(F, coeffs), flavor)
    return out


def _mc_chunks(args) -> list[dict[int, int]]:
    poly, H, d, flavor, seed, chunks = args
    box = BoxSpec(NumberField(poly), H, d)
    out = []
    for i, n in chunks:
        X = draw_chunk(box, seed, i, n)
        w = plain_witness_counts(box, X) if flavor == PLAIN else _generic_witness_counts(box, X, flavor)
        hist = np.bincount(w)
        out.append({v: int(c) for v, c in enumerate(hist) if c})
    return out


def monte_carlo_scan(
    box: BoxSpec,
    flavor: str = PLAIN,
    samples: int = 10**5,
    seed: int = DEFAULT_SEED,
    max_order: int = 2,
    threads: Optional[int] = None,
) -> EmpiricalReport:
    """Uniform i.i.d. tuples from the box.

    Samples are cut into fixed chunks of 2^16; chunk i always draws from the
    same Philox stream, so the report does not depend on the worker count.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    chunks = [(i, min(CHUNK, samples - i * CHUNK)) for i in range(-(-samples // CHUNK))]
    n = min(resolve_threads(threads), len(chunks))
    parts = [chunks[i::n] for i in range(n)]
    jobs = [(box.field.poly, box.H, box.d, flavor, seed, part) for part in parts]
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_mc_chunks, jobs))
    else:
        results = [_mc_chunks(jobs[0])]
    hist = _merge(h for part in results for h in part)
    total, target, sums = _accumulate(hist, _sums_order(max_order))
    return EmpiricalReport(
        str(box.field), box.d, flavor, box.H, MONTECARLO, max_order, total, target, tuple(sums),
        samples=samples, seed=seed, method="vectorized" if flavor == PLAIN else "per-sample",
    )


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class ComparisonRow:
    quantity: str
    empirical: mpq
    standard_error: Optional[float]
    lo: mpq
    hi: mpq
    delta: float
    allowed: float
    passed: bool


@dataclass
class ComparisonVerdict:
    rows: list[ComparisonRow] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def compare(
    analytic: Mapping, empirical: EmpiricalReport, tolerance: float, sigmas: float = 4.0
) -> ComparisonVerdict:
    """PASS per quantity iff |empirical - midpoint| <= tolerance + half-width (+ sigmas * SE).

    ``analytic`` maps quantity names to objects with ``lo`` and ``hi``.
    """
    verdict = ComparisonVerdict(tolerance=tolerance)
    emp = empirical.quantities()
    for name, enc in analytic.items():
        if name not in emp:
            continue
        e = emp[name]
        value = mpq(e.value.numerator, e.value.denominator)
        lo, hi = mpq(enc.lo), mpq(enc.hi)
        delta = abs(value - (lo + hi) / 2)
        allowed = mpq(tolerance) + (hi - lo) / 2
        if e.standard_error is not None:
            allowed += mpq(sigmas * e.standard_error)
        verdict.rows.append(
            ComparisonRow(name, value, e.standard_error, lo, hi, float(delta), float(allowed), delta <= allowed)
        )
    return verdict
