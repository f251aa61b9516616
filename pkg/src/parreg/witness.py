"""Witness-prime search: primes modulo which given rationals are simultaneously
non-n-th-power residues, plus the hypothesis checks of the existence lemmas
that guarantee such primes exist.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import (
    DegenerateInput,
    PrimeSieve,
    is_probable_prime,
    nth_power_in_Q,
    nth_power_mod_p,
    sieve,
)

DEFAULT_SEARCH_BOUND = 10**6

MODE_ODD_N = "ODD_N"
MODE_EVEN_N = "EVEN_N"
MODE_SQUARES = "SQUARES"
MODE_TWO_VAR = "TWO_VAR"

_PARALLEL_BLOCK = 4096


@dataclass(frozen=True)
class HypothesisCheck:
    description: str
    passed: bool


@dataclass(frozen=True)
class HypothesisReport:
    """Which existence lemma applies to the targets, with every sub-check recorded."""

    mode: str
    checks: tuple[HypothesisCheck, ...]

    @property
    def satisfied(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class WitnessPrime:
    """A prime p together with the per-target n-th-power-residue booleans.

    For a negative-partition-regularity certificate every boolean is False.
    lower_bound_satisfied records p > max(|a|+|b|, |c|) relative to the caller's
    stated threshold (min_exclusive).
    """

    p: int
    n: int
    targets: tuple[tuple[Fraction, bool], ...]
    lower_bound_satisfied: bool


def _normalize_targets(targets) -> tuple[Fraction, ...]:
    seen = []
    for t in targets:
        t = Fraction(t)
        if t not in seen:
            seen.append(t)
    if not seen:
        raise DegenerateInput("need at least one target")
    if any(t == 0 for t in seen):
        raise DegenerateInput("targets must be nonzero")
    return tuple(seen)


def _not_power_check(t: Fraction, k: int) -> HypothesisCheck:
    root = nth_power_in_Q(t, k)
    return HypothesisCheck(
        description=f"{t} is not a {k}th power in Q",
        passed=root is None,
    )


def _squares_report(ts: tuple[Fraction, ...]) -> HypothesisReport:
    checks = [_not_power_check(t, 2) for t in ts]
    prod = ts[0] * ts[1] * ts[2]
    checks.append(
        HypothesisCheck(
            description=f"product {prod} is not a square in Q",
            passed=nth_power_in_Q(prod, 2) is None,
        )
    )
    return HypothesisReport(mode=MODE_SQUARES, checks=tuple(checks))


def _even_report(ts: tuple[Fraction, ...], n: int) -> HypothesisReport:
    checks = [_not_power_check(t, n // 2) for t in ts]
    if n % 4 == 0:
        some_not = any(nth_power_in_Q(t, n // 4) is None for t in ts)
        checks.append(
            HypothesisCheck(
                description=f"at least one target is not a {n // 4}th power in Q",
                passed=some_not,
            )
        )
    return HypothesisReport(mode=MODE_EVEN_N, checks=tuple(checks))


def check_hypotheses(targets, n: int) -> HypothesisReport:
    """Decide which prime-existence lemma applies and record every sub-check.

    Two targets (or one, reusing the two-variable lemma diagonally) go through
    TWO_VAR.  Three targets: odd n uses ODD_N; n in {2, 4} uses SQUARES (the
    (n/2)- and (n/4)-power requirements degenerate there, and a prime where
    none are squares serves every even exponent); even n >= 6 uses EVEN_N,
    falling back to SQUARES when EVEN_N fails but the square checks pass.
    """
    ts = _normalize_targets(targets)
    if n < 1:
        raise DegenerateInput("n must be >= 1")
    if len(ts) > 3:
        raise DegenerateInput("at most three targets")
    if len(ts) <= 2:
        k = n // 2 if n % 4 == 0 else n
        return HypothesisReport(
            mode=MODE_TWO_VAR, checks=tuple(_not_power_check(t, k) for t in ts)
        )
    if n % 2 == 1:
        return HypothesisReport(
            mode=MODE_ODD_N, checks=tuple(_not_power_check(t, n) for t in ts)
        )
    if n in (2, 4):
        return _squares_report(ts)
    report = _even_report(ts, n)
    if not report.satisfied:
        squares = _squares_report(ts)
        if squares.satisfied:
            return squares
    return report


def _target_pairs(ts: tuple[Fraction, ...]) -> tuple[tuple[int, int], ...]:
    return tuple((t.numerator, t.denominator) for t in ts)


def _prime_is_witness(p: int, pairs, n: int) -> bool:
    """True when every target reduces mod p and none is an n-th power residue."""
    e = (p - 1) // gcd(n, p - 1)
    for num, den in pairs:
        r = num % p
        if r == 0 or den % p == 0:
            return False
        if den != 1:
            r = r * pow(den, p - 2, p) % p
        if pow(r, e, p) == 1:
            return False
    return True


def _scan_block(args) -> int | None:
    primes, pairs, n = args
    for p in primes:
        if _prime_is_witness(p, pairs, n):
            return p
    return None


def find_witness_prime(
    targets,
    n: int,
    min_exclusive: int = 1,
    search_bound: int = DEFAULT_SEARCH_BOUND,
    prime_sieve: PrimeSieve | None = None,
    workers: int = 1,
) -> WitnessPrime | None:
    """Smallest prime p with min_exclusive < p <= search_bound modulo which every
    target is a non-n-th-power residue.  None when the bound is exhausted; the
    caller distinguishes "enlarge the bound" from "hypotheses unmet".

    Primes dividing any target's numerator or denominator are skipped (no
    residue to test).  Sharded scans still return the global minimum.
    """
    ts = _normalize_targets(targets)
    if n < 1:
        raise DegenerateInput("n must be >= 1")
    if search_bound < min_exclusive:
        raise DegenerateInput("search_bound must be >= min_exclusive")
    if prime_sieve is not None and prime_sieve.bound >= search_bound:
        primes = prime_sieve.primes_upto(search_bound)
    else:
        primes = sieve(search_bound).primes
    pairs = _target_pairs(ts)
    found: int | None = None
    if workers <= 1:
        for p in primes:
            if p <= min_exclusive:
                continue
            if _prime_is_witness(p, pairs, n):
                found = p
                break
    else:
        live = [p for p in primes if p > min_exclusive]
        blocks = [
            (tuple(live[i : i + _PARALLEL_BLOCK]), pairs, n)
            for i in range(0, len(live), _PARALLEL_BLOCK)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for hit in pool.map(_scan_block, blocks):
                if hit is not None:
                    found = hit
                    break
    if found is None:
        return None
    return WitnessPrime(
        p=found,
        n=n,
        targets=tuple((t, False) for t in ts),
        lower_bound_satisfied=found > min_exclusive,
    )


def verify_witness(w: WitnessPrime) -> bool:
    """Recompute every stored Euler-criterion boolean from scratch."""
    if not is_probable_prime(w.p):
        return False
    for t, flag in w.targets:
        if t.numerator % w.p == 0 or t.denominator % w.p == 0:
            return False
        if nth_power_mod_p(t, w.n, w.p) != flag:
            return False
    return True


# ---------------------------------------------------------------------------
# Systems


def ratio_set(a, b, c) -> frozenset[Fraction]:
    """The value set {a/c, b/c, (a+b)/c} of one row (duplicates collapse)."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0 or b == 0 or c == 0:
        raise DegenerateInput("row coefficients must be nonzero")
    return frozenset({a / c, b / c, (a + b) / c})


def system_union(rows) -> frozenset[Fraction]:
    out: frozenset[Fraction] = frozenset()
    for a, b, c in rows:
        out |= ratio_set(a, b, c)
    return out


def system_intersection(rows) -> frozenset[Fraction]:
    sets = [ratio_set(a, b, c) for a, b, c in rows]
    out = sets[0]
    for s in sets[1:]:
        out &= s
    return out


def _system_conditions(p: int, rows, union, inter, n: int) -> tuple[bool, bool, bool]:
    """The three prime conditions of the system obstruction theorem.

    (i)  no a_i, b_i, c_i, a_i+b_i vanishes mod p;
    (ii) distinct members of the row-ratio union stay distinct mod p;
    (iii) no member of the intersection is an n-th power residue mod p.
    """
    for a, b, c in rows:
        for v in (a, b, c, a + b):
            v = Fraction(v)
            if v.numerator % p == 0 or v.denominator % p == 0:
                return (False, True, True)
    residues = set()
    for v in union:
        r = v.numerator * pow(v.denominator, p - 2, p) % p
        residues.add(r)
    if len(residues) != len(union):
        return (True, False, True)
    for v in inter:
        if nth_power_mod_p(v, n, p):
            return (True, True, False)
    return (True, True, True)


def find_system_witness(
    rows,
    n: int,
    search_bound: int = DEFAULT_SEARCH_BOUND,
    prime_sieve: PrimeSieve | None = None,
) -> WitnessPrime | None:
    """Smallest prime <= search_bound meeting all three system conditions.

    The returned targets are the members of the row-ratio intersection I with
    their (all-False) n-th-power booleans; an empty I makes condition (iii)
    vacuous and any prime clearing (i) and (ii) qualifies.
    """
    rows = tuple((int(a), int(b), int(c)) for a, b, c in rows)
    if not rows:
        raise DegenerateInput("need at least one row")
    if n < 1:
        raise DegenerateInput("n must be >= 1")
    union = sorted(system_union(rows))
    inter = sorted(system_intersection(rows))
    if prime_sieve is not None and prime_sieve.bound >= search_bound:
        primes = prime_sieve.primes_upto(search_bound)
    else:
        primes = sieve(search_bound).primes
    for p in primes:
        if all(_system_conditions(p, rows, union, inter, n)):
            return WitnessPrime(
                p=p,
                n=n,
                targets=tuple((v, False) for v in inter),
                lower_bound_satisfied=True,
            )
    return None


def verify_system_witness(w: WitnessPrime, rows, n: int) -> bool:
    """Recompute the three system conditions for the stored prime."""
    if not is_probable_prime(w.p) or w.n != n:
        return False
    rows = tuple((int(a), int(b), int(c)) for a, b, c in rows)
    union = sorted(system_union(rows))
    inter = sorted(system_intersection(rows))
    if tuple(v for v, _ in w.targets) != tuple(inter):
        return False
    if any(flag for _, flag in w.targets):
        return False
    return all(_system_conditions(w.p, rows, union, inter, n))
