"""Eisenstein polynomials over monogenic number fields: exact local densities,
moment enclosures, and box-count ground truth."""

from .eisenstein import (
    PLAIN,
    SHIFTED,
    CoefficientTuple,
    EisensteinWitness,
    candidate_primes_eisenstein,
    candidate_primes_shifted,
    discriminant,
    is_p_eisenstein,
    is_shifted_p_eisenstein,
    shift_poly,
)
from .lab import BoxSpec, EmpiricalReport, compare, exhaustive_scan, monte_carlo_scan, witness_count
from .moments import (
    EnclosedValue,
    LocalDensitySystem,
    analyze,
    build_system,
    density,
    local_density,
    mean,
    nth_moment,
    partition_shapes,
    restricted_moment,
    restricted_variance,
    variance,
)
from .numberfield import AlgebraicInteger, NumberField, PrimeIdealData, split_prime, primes_up_to

__version__ = "0.1.0"
