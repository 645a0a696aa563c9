import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldbach_audit.errors import InvalidArgumentError, OutOfRangeError, ResourceLimitError
from goldbach_audit.sieve import build_sieve, build_spf, factorize_any, small_primes

import oracles

N_PROP = 10**5


@pytest.fixture(scope="module")
def td_flags():
    return oracles.prime_flags_td(N_PROP)


def test_limit_10():
    t = build_sieve(10)
    assert [n for n in range(11) if t.is_prime(n)] == [2, 3, 5, 7]


def test_limit_3():
    t = build_sieve(3)
    assert [n for n in range(4) if t.is_prime(n)] == [2, 3]
    assert t.pi(3) == 2


def test_limit_100_has_25_primes():
    # 25 from trial division over 2..100
    t = build_sieve(100)
    assert sum(t.is_prime(n) for n in range(101)) == 25


@pytest.mark.parametrize("n, expected", [(0, False), (1, False), (2, True), (97, True), (91, False)])
def test_is_prime_examples(table, n, expected):
    assert table.is_prime(n) is expected


@pytest.mark.parametrize("x, expected", [(0, 0), (1, 0), (2, 1), (10, 4), (100, 25)])
def test_pi_examples(table, x, expected):
    assert table.pi(x) == expected


def test_rejects_small_limit():
    with pytest.raises(InvalidArgumentError):
        build_sieve(2)


def test_memory_budget():
    with pytest.raises(ResourceLimitError):
        build_sieve(10**9, memory_budget=10**6)
    with pytest.raises(ResourceLimitError):
        build_spf(10**7, memory_budget=10**6)


def test_out_of_range(table):
    with pytest.raises(OutOfRangeError):
        table.is_prime(table.limit + 1)
    with pytest.raises(OutOfRangeError):
        table.pi(table.limit + 1)
    with pytest.raises(OutOfRangeError):
        table.is_prime_many([table.limit + 1])


def test_exhaustive_against_trial_division(td_flags):
    t = build_sieve(N_PROP)
    got = t.is_prime_many(np.arange(N_PROP + 1))
    assert got.tolist() == td_flags


@pytest.mark.parametrize("segment", [8, 64, 1000, 1 << 20])
def test_segment_size_does_not_matter(segment, td_flags):
    t = build_sieve(20011, segment_size=segment)
    assert t.is_prime_many(np.arange(20012)).tolist() == td_flags[:20012]


@pytest.mark.parametrize("limit", [3, 4, 5, 17, 18, 19, 20, 63, 64, 65, 1000])
def test_odd_and_even_limits(limit, td_flags):
    t = build_sieve(limit)
    assert t.pi(limit) == sum(td_flags[: limit + 1])
    assert t.primes().tolist() == [n for n in range(limit + 1) if td_flags[n]]


def test_pi_steps(td_flags):
    t = build_sieve(N_PROP)
    pis = t.pi_many(np.arange(N_PROP + 1))
    steps = np.diff(pis)
    assert set(np.unique(steps).tolist()) <= {0, 1}
    assert (steps == 1).tolist() == td_flags[1:]
    assert [t.pi(x) for x in range(0, 2000)] == pis[:2000].tolist()


def test_odd_prime_flags_window(table):
    w = table.odd_prime_flags(91, 111)
    assert (91 + 2 * np.flatnonzero(w)).tolist() == [97, 101, 103, 107, 109]
    assert table.odd_prime_flags(1, 7).tolist() == [False, True, True, True]
    with pytest.raises(InvalidArgumentError):
        table.odd_prime_flags(4, 10)


def test_primes_window(table):
    assert table.primes(0, 20).tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
    assert table.primes(14, 16).tolist() == []
    assert table.next_prime_above(89) == 97


def test_small_primes():
    assert small_primes(1).tolist() == []
    assert small_primes(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


# --- SPF / factorization / totient ---

@pytest.mark.parametrize(
    "n, factors",
    [(20, ((2, 2), (5, 1))), (9, ((3, 2),)), (97, ((97, 1),)), (2, ((2, 1),))],
)
def test_factorize_examples(spf, n, factors):
    assert spf.factorize(n).factors == factors


@pytest.mark.parametrize("n, phi", [(1, 1), (10, 4), (20, 8)])
def test_totient_examples(spf, n, phi):
    assert spf.totient(n) == phi


def test_factorize_errors(spf):
    with pytest.raises(InvalidArgumentError):
        spf.factorize(1)
    with pytest.raises(OutOfRangeError):
        spf.factorize(spf.limit + 1)
    with pytest.raises(InvalidArgumentError):
        spf.totient(0)


def test_spf_invariants(spf, td_flags):
    s = spf.spf
    for n in range(2, N_PROP + 1):
        p = int(s[n])
        assert td_flags[p] and n % p == 0
        assert (p == n) == td_flags[n]
    # no smaller prime divides n: spot-check the definition exhaustively up to 5000
    for n in range(2, 5000):
        assert int(s[n]) == next(d for d in range(2, n + 1) if n % d == 0)


def test_factorize_product_and_primality(spf, td_flags):
    for n in range(2, N_PROP + 1):
        f = spf.factorize(n)
        assert f.product() == n
        assert all(td_flags[p] for p, _ in f)
        assert list(f.primes) == sorted(set(f.primes))


def test_totient_against_gcd_count(spf):
    # the full [1, 10^5] sweep of gcd counts is quadratic; sweep a prefix
    # exhaustively and sample the rest
    for n in range(1, 3000):
        assert spf.totient(n) == oracles.totient_gcd(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=3000, max_value=N_PROP))
def test_totient_against_gcd_count_sampled(spf, n):
    assert spf.totient(n) == oracles.totient_gcd(n)


@pytest.fixture(scope="module")
def table_1e6():
    return build_sieve(10**6)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=2, max_value=10**10))
def test_factorize_any_beyond_spf(table_1e6, n):
    f = factorize_any(n, build_spf(1000), table_1e6)
    assert f.product() == n
    assert f.factors == tuple(oracles.factor_td(n))


def test_factorization_totient_matches_product_formula(spf):
    for n in (2, 36, 97, 360, 199999):
        f = spf.factorize(n)
        expected = n
        for p, _ in f:
            expected = expected * (p - 1) // p
        assert f.totient() == expected == round(n * math.prod(1 - 1 / p for p in f.primes))


def test_totient_full_range_against_phi_sieve(spf):
    ref = oracles.totient_sieve(N_PROP)
    assert all(spf.totient(n) == ref[n] for n in range(1, N_PROP + 1))
