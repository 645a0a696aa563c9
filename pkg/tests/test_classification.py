from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldbach_audit.classification import (
    EvenTarget,
    bertrand_witness,
    classify,
    fast_counts,
)
from goldbach_audit.errors import InvalidArgumentError, OutOfRangeError
from goldbach_audit.sieve import build_sieve, build_spf

import oracles


def test_even_target_validation():
    assert EvenTarget(20).half == 10
    for bad in (3, 2, 0, -4, 21, 4.0, True):
        with pytest.raises(InvalidArgumentError):
            EvenTarget(bad)


def test_classify_20(table, spf):
    c = classify(table, spf, 20)
    assert c.q_primes == (2, 5)
    assert c.p_primes.tolist() == [3, 7, 11, 13, 17]
    assert c.x_composites.tolist() == [9]
    assert c.a_integers.tolist() == [17, 13, 11, 9, 7, 3]
    assert (c.h, c.s) == (5, 1)
    assert c.P(1) == 3 and c.X(1) == 9


def test_classify_8(table, spf):
    c = classify(table, spf, 8)
    assert c.q_primes == (2,)
    assert c.p_primes.tolist() == [3, 5]
    assert c.s == 0


def test_classify_22(table, spf):
    c = classify(table, spf, 22)
    assert c.p_primes.tolist() == [3, 5, 7, 13, 17, 19]
    assert c.x_composites.tolist() == [15, 9]
    assert (c.h, c.s) == (6, 2)


@pytest.mark.parametrize("two_n", [4, 6])
def test_degenerate_targets(table, spf, two_n):
    c = classify(table, spf, two_n)
    assert c.h == c.s == 0
    assert c.a_integers.size == 0
    assert c.q_primes == tuple(p for p in (2, 3) if two_n % p == 0)
    counts = fast_counts(table, spf, two_n)
    assert counts.h == counts.s == 0


def test_index_errors(table, spf):
    c = classify(table, spf, 20)
    with pytest.raises(IndexError):
        c.P(0)
    with pytest.raises(IndexError):
        c.X(2)


def test_arrays_are_read_only(table, spf):
    c = classify(table, spf, 30)
    with pytest.raises(ValueError):
        c.p_primes[0] = 5


def test_out_of_range():
    t, s = build_sieve(50), build_spf(50)
    with pytest.raises(OutOfRangeError):
        classify(t, s, 52)
    with pytest.raises(OutOfRangeError):
        fast_counts(t, s, 52)


def test_fast_counts_20(table, spf):
    c = fast_counts(table, spf, 20)
    assert (c.h, c.s, c.pi_2n_minus_3, c.omega_odd, c.phi_2n) == (5, 1, 7, 1, 8)


def test_fast_counts_4(table, spf):
    c = fast_counts(table, spf, 4)
    assert (c.h, c.s, c.phi_2n) == (0, 0, 2)


def test_fast_counts_3e6_against_classify():
    # h = pi(2999997) - 3 and phi(3e6) = 800000, both from sympy
    t, s = build_sieve(3 * 10**6), build_spf(3 * 10**6)
    fc = fast_counts(t, s, 3 * 10**6)
    c = classify(t, s, 3 * 10**6)
    assert (fc.h, fc.s) == (c.h, c.s) == (216812, 583186)
    assert fc.s > fc.h


def test_classify_matches_definitions_by_brute_force(table, spf, flags_1e4):
    # X is built by full factorization here, which also checks that
    # "composite and coprime to 2N" is the same set
    for two_n in range(4, 1200, 2):
        q, p, x, a = oracles.classify_brute(two_n, flags_1e4)
        c = classify(table, spf, two_n)
        assert list(c.q_primes) == q
        assert c.p_primes.tolist() == p
        assert c.x_composites.tolist() == x
        assert c.a_integers.tolist() == a


def test_classification_invariants(table, spf):
    for two_n in list(range(8, 3000, 2)) + [199998, 200000, 30030 * 6]:
        c = classify(table, spf, two_n)
        fc = fast_counts(table, spf, two_n)
        assert (c.h, c.s) == (fc.h, fc.s)
        assert c.h + c.s == spf.totient(two_n) - 2
        assert fc.h == fc.pi_2n_minus_3 - 1 - fc.omega_odd
        a = c.a_integers
        assert np.all(np.diff(c.p_primes) > 0)
        assert np.all(np.diff(c.x_composites) < 0)
        assert np.all(np.diff(a) < 0)
        assert sorted(set(a.tolist()) - set(c.p_primes.tolist()) - set(c.x_composites.tolist())) == []
        assert set((two_n - a).tolist()) == set(a.tolist())
        assert int(a[0]) == two_n - c.P(1)
        if c.s:
            assert c.X(c.s) == c.P(1) ** 2
        assert all(two_n % q == 0 for q in c.q_primes)
        primes_below = set(table.primes(2, two_n - 3).tolist())
        assert primes_below <= set(c.q_primes) | set(c.p_primes.tolist())
        assert not set(c.q_primes) & set(c.p_primes.tolist())


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=4, max_value=10**5).map(lambda k: 2 * k))
def test_membership_characterization(table, spf, two_n):
    c = classify(table, spf, two_n)
    expected = [a for a in range(two_n - 3, 2, -1) if gcd(a, two_n) == 1]
    assert c.a_integers.tolist() == expected
    assert c.h + c.s == spf.totient(two_n) - 2


def test_h_at_least_two_small(table, spf):
    for two_n in range(8, 20000, 2):
        assert fast_counts(table, spf, two_n).h >= 2


@pytest.mark.parametrize("two_n, allowed", [(8, {5}), (20, {11, 13, 17}), (22, {13, 17, 19})])
def test_bertrand_witness_examples(table, two_n, allowed):
    assert bertrand_witness(table, two_n) in allowed


def test_bertrand_witness_is_type_p(table, flags_1e4):
    for two_n in range(8, 10**4, 2):
        p = bertrand_witness(table, two_n)
        assert flags_1e4[p] and two_n // 2 < p < two_n - 2 and two_n % p


def test_bertrand_witness_rejects_small(table):
    with pytest.raises(InvalidArgumentError):
        bertrand_witness(table, 6)
