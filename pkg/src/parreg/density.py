"""Empirical n-th-power-residue densities over primes, with exact counts and
inclusion-exclusion bookkeeping for joint surveys.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .arith import DegenerateInput, PrimeSieve, nth_power_mod_p, sieve


def _primes(prime_bound: int, prime_sieve: PrimeSieve | None):
    if prime_sieve is not None and prime_sieve.bound >= prime_bound:
        return prime_sieve.primes_upto(prime_bound)
    return sieve(prime_bound).primes


def _admissible(q: Fraction, p: int) -> bool:
    return q.numerator % p != 0 and q.denominator % p != 0


@dataclass(frozen=True)
class DensitySurvey:
    target: Fraction
    n: int
    prime_bound: int
    admissible_count: int
    hit_count: int
    density: Fraction


@dataclass(frozen=True)
class JointSurvey:
    """Counts over primes admissible for every target at once.

    subset_hits[idx_tuple] counts primes where ALL targets in the subset are
    n-th power residues; at_least_one / all_targets / none derive from it and
    the inclusion-exclusion identity is asserted exactly at construction time.
    """

    targets: tuple[Fraction, ...]
    n: int
    prime_bound: int
    admissible_count: int
    subset_hits: dict
    at_least_one: int
    all_targets: int
    none: int


def survey(
    target, n: int, prime_bound: int, prime_sieve: PrimeSieve | None = None
) -> DensitySurvey:
    """Exact hit and admissibility counts for one target via the Euler
    criterion; primes dividing the target's numerator or denominator are
    inadmissible.
    """
    q = Fraction(target)
    if q == 0:
        raise DegenerateInput("target must be nonzero")
    if n < 1:
        raise DegenerateInput("n must be >= 1")
    admissible = 0
    hits = 0
    for p in _primes(prime_bound, prime_sieve):
        if not _admissible(q, p):
            continue
        admissible += 1
        if nth_power_mod_p(q, n, p):
            hits += 1
    density = Fraction(hits, admissible) if admissible else Fraction(0)
    return DensitySurvey(
        target=q,
        n=n,
        prime_bound=prime_bound,
        admissible_count=admissible,
        hit_count=hits,
        density=density,
    )


def admissible_primes(
    target, prime_bound: int, prime_sieve: PrimeSieve | None = None
) -> tuple[int, ...]:
    q = Fraction(target)
    if q == 0:
        raise DegenerateInput("target must be nonzero")
    return tuple(p for p in _primes(prime_bound, prime_sieve) if _admissible(q, p))


def hit_primes(
    target, n: int, prime_bound: int, prime_sieve: PrimeSieve | None = None
) -> tuple[int, ...]:
    """The admissible primes modulo which the target is an n-th power residue."""
    q = Fraction(target)
    return tuple(
        p for p in admissible_primes(q, prime_bound, prime_sieve)
        if nth_power_mod_p(q, n, p)
    )


def joint_survey(
    targets, n: int, prime_bound: int, prime_sieve: PrimeSieve | None = None
) -> JointSurvey:
    """Per-subset all-hit counts over primes admissible for every target, with
    the inclusion-exclusion identity checked exactly (counts, not estimates).
    """
    qs = tuple(Fraction(t) for t in targets)
    if not qs or any(q == 0 for q in qs):
        raise DegenerateInput("targets must be nonzero and nonempty")
    if n < 1:
        raise DegenerateInput("n must be >= 1")
    k = len(qs)
    idx = tuple(range(k))
    subsets = [s for size in range(1, k + 1) for s in combinations(idx, size)]
    subset_hits = {s: 0 for s in subsets}
    admissible = 0
    at_least_one = 0
    none = 0
    for p in _primes(prime_bound, prime_sieve):
        if not all(_admissible(q, p) for q in qs):
            continue
        admissible += 1
        flags = tuple(nth_power_mod_p(q, n, p) for q in qs)
        if any(flags):
            at_least_one += 1
        else:
            none += 1
        for s in subsets:
            if all(flags[i] for i in s):
                subset_hits[s] += 1
    ie = sum(
        (-1) ** (len(s) + 1) * subset_hits[s] for s in subsets
    )
    if ie != at_least_one or none != admissible - at_least_one:
        raise AssertionError("inclusion-exclusion bookkeeping broke")
    return JointSurvey(
        targets=qs,
        n=n,
        prime_bound=prime_bound,
        admissible_count=admissible,
        subset_hits=subset_hits,
        at_least_one=at_least_one,
        all_targets=subset_hits[idx],
        none=none,
    )


def write_csv(
    out,
    targets,
    n: int,
    prime_bound: int,
    residue_modulus: int = 24,
    prime_sieve: PrimeSieve | None = None,
) -> int:
    """Emit one row per admissible prime: prime, prime mod residue_modulus,
    then a hit flag per target.  Returns the number of data rows written.
    """
    qs = tuple(Fraction(t) for t in targets)
    if not qs or any(q == 0 for q in qs):
        raise DegenerateInput("targets must be nonzero and nonempty")
    w = csv.writer(out)
    w.writerow(
        ["prime", f"mod{residue_modulus}"] + [f"hit_{q}" for q in qs]
    )
    rows = 0
    for p in _primes(prime_bound, prime_sieve):
        if not all(_admissible(q, p) for q in qs):
            continue
        flags = [int(nth_power_mod_p(q, n, p)) for q in qs]
        w.writerow([p, p % residue_modulus] + flags)
        rows += 1
    return rows
