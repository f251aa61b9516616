"""Witness primes: hypothesis checks, single-target and system searches.

Brute-force residue oracles live in this file; frozen values below were
produced by those oracles, not by the code under test.
"""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parreg.arith import DegenerateInput, sieve
from parreg.witness import (
    MODE_EVEN_N,
    MODE_ODD_N,
    MODE_SQUARES,
    MODE_TWO_VAR,
    WitnessPrime,
    check_hypotheses,
    find_system_witness,
    find_witness_prime,
    ratio_set,
    system_intersection,
    system_union,
    verify_system_witness,
    verify_witness,
)


def naive_primes(bound):
    out = []
    for k in range(2, bound + 1):
        if all(k % d for d in range(2, int(k**0.5) + 1)):
            out.append(k)
    return out


def brute_is_witness(p, targets, n):
    powers = {pow(x, n, p) for x in range(1, p)}
    for q in targets:
        q = Fraction(q)
        if q.numerator % p == 0 or q.denominator % p == 0:
            return False
        if q.numerator * pow(q.denominator, -1, p) % p in powers:
            return False
    return True


# ---------------------------------------------------------------------------
# hypothesis reports


def test_modes_on_pinned_inputs():
    assert check_hypotheses([2, 3, 5], 2).mode == MODE_SQUARES
    assert check_hypotheses([2, 3, 5], 3).mode == MODE_ODD_N
    assert check_hypotheses([2, 3, 5], 6).mode == MODE_EVEN_N
    assert check_hypotheses([2, 3], 8).mode == MODE_TWO_VAR
    assert check_hypotheses([2, 2, 2], 5).mode == MODE_TWO_VAR  # dedupes to one target


def test_squares_mode_detects_square_product():
    # 60 * 90 * 150 = 810000 = 900^2 blocks the square route
    rep = check_hypotheses([60, 90, 150], 2)
    assert rep.mode == MODE_SQUARES
    assert not rep.satisfied
    assert any("product" in c.description for c in rep.checks if not c.passed)


def test_squares_mode_satisfied():
    rep = check_hypotheses([2, 3, 5], 2)
    assert rep.satisfied
    assert all(c.passed for c in rep.checks)


def test_even_mode_with_fourth_power_row():
    # n = 12: checks are 6th powers plus the any-not-cube row
    rep = check_hypotheses([2, 3, 5], 12)
    assert rep.mode == MODE_EVEN_N
    assert rep.satisfied
    rep = check_hypotheses([81, 729, 810], 12)
    assert not rep.satisfied  # 729 = 3^6


def test_two_var_exponent_halves_when_4_divides_n():
    # 4 | 8: targets must fail to be 4th powers; 16 = 2^4 trips it
    assert not check_hypotheses([16, 17], 8).satisfied
    assert check_hypotheses([17, 33], 8).satisfied


def test_degenerate_targets():
    with pytest.raises(DegenerateInput):
        check_hypotheses([], 2)
    with pytest.raises(DegenerateInput):
        check_hypotheses([0, 2], 2)
    with pytest.raises(DegenerateInput):
        check_hypotheses([1, 2, 3, 4], 2)


# ---------------------------------------------------------------------------
# single search


def test_brute_force_oracle_pins_43():
    qualifying = [p for p in naive_primes(100) if brute_is_witness(p, [2, 3, 5], 2)]
    assert qualifying[0] == 43  # oracle for the frozen expectation below


def test_find_witness_prime_returns_43():
    w = find_witness_prime([2, 3, 5], 2)
    assert w is not None
    assert w.p == 43
    assert w.n == 2
    assert all(flag is False for _, flag in w.targets)
    assert verify_witness(w)


def test_no_smaller_prime_qualifies():
    for p in naive_primes(42):
        if p > 5:
            assert not brute_is_witness(p, [2, 3, 5], 2), p


def test_min_exclusive_skips_small_primes():
    w = find_witness_prime([2, 3, 5], 2, min_exclusive=43)
    assert w is not None and w.p > 43
    assert brute_is_witness(w.p, [2, 3, 5], 2)


def test_exhaustion_returns_none():
    # 16 is an 8th-power residue modulo every prime
    assert find_witness_prime([3, 13, 16], 8, search_bound=20000) is None


def test_one_is_never_witnessable():
    assert find_witness_prime([1], 3, search_bound=1000) is None


def test_rational_targets():
    w = find_witness_prime([Fraction(2, 3), 5], 2, search_bound=10**4)
    assert w is not None
    assert brute_is_witness(w.p, [Fraction(2, 3), 5], 2)


def test_workers_agree_with_serial():
    for targets, n in ([2, 3, 5], 2), ([2, 5], 3), ([7, 10, 17], 4):
        a = find_witness_prime(targets, n, search_bound=10**4)
        b = find_witness_prime(targets, n, search_bound=10**4, workers=2)
        assert (a is None) == (b is None)
        if a is not None:
            assert a == b


def test_explicit_sieve_reuse():
    s = sieve(10**4)
    w = find_witness_prime([2, 3, 5], 2, search_bound=10**4, prime_sieve=s)
    assert w is not None and w.p == 43


def test_verify_witness_rejects_tampering():
    w = find_witness_prime([2, 3, 5], 2)
    assert verify_witness(w)
    assert not verify_witness(WitnessPrime(41, w.n, w.targets, w.lower_bound_satisfied))
    bad_flags = tuple((q, True) for q, _ in w.targets)
    assert not verify_witness(WitnessPrime(w.p, w.n, bad_flags, w.lower_bound_satisfied))
    # 2 is a cube mod 43, so rewriting n to 3 makes the stored flags false
    assert not verify_witness(WitnessPrime(w.p, 3, w.targets, w.lower_bound_satisfied))


@given(st.lists(st.integers(min_value=2, max_value=60), min_size=1, max_size=3),
       st.integers(min_value=2, max_value=6))
@settings(max_examples=40, deadline=None)
def test_found_witness_always_passes_brute_force(targets, n):
    w = find_witness_prime(targets, n, search_bound=3000)
    if w is not None:
        assert brute_is_witness(w.p, targets, n)
        assert verify_witness(w)


# ---------------------------------------------------------------------------
# ratio sets and system search


def test_ratio_set_examples():
    assert ratio_set(2, 3, 1) == frozenset({Fraction(2), Fraction(3), Fraction(5)})
    assert ratio_set(1, -1, 1) == frozenset({Fraction(1), Fraction(-1), Fraction(0)})
    assert ratio_set(4, 6, 2) == frozenset({Fraction(2), Fraction(3), Fraction(5)})
    with pytest.raises(DegenerateInput):
        ratio_set(0, 1, 1)


def test_union_and_intersection():
    rows = ((16, 17, 1), (33, 4063, 1))
    assert system_union(rows) == frozenset({16, 17, 33, 4063, 4096})
    assert system_intersection(rows) == frozenset({33})
    cyc = ((8, 27, 1), (27, 343, 1), (343, 8, 1))
    assert system_intersection(cyc) == frozenset()


def brute_system_witness(p, rows, n):
    union = set()
    for a, b, c in rows:
        for q in (Fraction(a, c), Fraction(b, c), Fraction(a + b, c)):
            union.add(q)
        for v in (a, b, c, a + b):
            if v % p == 0:
                return False
    residues = {q.numerator * pow(q.denominator, -1, p) % p for q in union}
    if len(residues) != len(union):
        return False
    powers = {pow(x, n, p) for x in range(1, p)}
    inter = None
    for a, b, c in rows:
        s = {Fraction(a, c), Fraction(b, c), Fraction(a + b, c)}
        inter = s if inter is None else inter & s
    for q in inter:
        if q.numerator * pow(q.denominator, -1, p) % p in powers:
            return False
    return True


def test_system_witness_pinned_23():
    rows = ((16, 17, 1), (33, 4063, 1))
    qualifying = [p for p in naive_primes(60) if brute_system_witness(p, rows, 8)]
    assert qualifying[0] == 23  # oracle
    w = find_system_witness(rows, 8)
    assert w is not None and w.p == 23
    assert verify_system_witness(w, rows, 8)


def test_system_witness_none_when_member_always_hits():
    # 16 in the intersection is an 8th-power residue everywhere
    rows = ((16, 17, 1), (33, -17, 1))
    assert find_system_witness(rows, 8, search_bound=20000) is None


def test_system_witness_condition_ii_distinctness():
    rows = ((2, 3, 1), (2, 3, 1))
    w = find_system_witness(rows, 2, search_bound=200)
    assert w is not None
    assert brute_system_witness(w.p, rows, 2)
    for p in naive_primes(w.p - 1):
        assert not brute_system_witness(p, rows, 2)


def test_verify_system_witness_rejects_tampering():
    rows = ((16, 17, 1), (33, 4063, 1))
    w = find_system_witness(rows, 8)
    # 33 is an 8th-power residue mod 31, so p=31 fails condition (iii)
    assert not brute_system_witness(31, rows, 8)
    assert not verify_system_witness(WitnessPrime(31, w.n, w.targets, True), rows, 8)
    assert not verify_system_witness(WitnessPrime(24, w.n, w.targets, True), rows, 8)
    bad_flags = tuple((q, True) for q, _ in w.targets)
    assert not verify_system_witness(WitnessPrime(w.p, w.n, bad_flags, True), rows, 8)
    assert not verify_system_witness(w, ((16, 17, 1), (33, 17, 1)), 8)
