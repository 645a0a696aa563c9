"""Odd-only segmented sieve, smallest-prime-factor table and totients.

The sieve stores one composite flag per odd integer >= 3 (bit ``i`` stands
for ``2*i + 3``), packed little-endian into ``uint8`` words.  A per-byte
prefix count makes ``pi(x)`` an O(1) lookup, which is what the range
scanner leans on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidArgumentError, OutOfRangeError, ResourceLimitError

SEGMENT_SIZE = 1 << 20  # odd flags sieved per segment
DEFAULT_MEMORY_BUDGET = 1 << 30  # bytes

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def small_primes(n: int) -> np.ndarray:
    """All primes <= n by a plain (unsegmented) sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_bytes(limit: int) -> int:
    n_odd = (limit - 1) // 2
    return (n_odd + 7) // 8


@dataclass(frozen=True, eq=False)
class SieveTable:
    """Primality and prime counting for every ``0 <= n <= limit``.

    Immutable once built; share it freely between readers (and forked
    worker processes).
    """

    limit: int
    bits: np.ndarray  # packed composite flags, odd n only
    rank: np.ndarray  # rank[k] = odd primes among flag bits [0, 8k)

    def _check(self, n: int) -> None:
        if n < 0 or n > self.limit:
            raise OutOfRangeError(f"{n} outside sieve coverage [0, {self.limit}]")

    def is_prime(self, n: int) -> bool:
        self._check(n)
        if n < 3:
            return n == 2
        if not n & 1:
            return False
        i = (n - 3) >> 1
        return not (self.bits[i >> 3] >> (i & 7)) & 1

    def is_prime_many(self, ns) -> np.ndarray:
        """Vectorised :meth:`is_prime` over an integer array."""
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and (ns.min() < 0 or ns.max() > self.limit):
            raise OutOfRangeError(f"values outside sieve coverage [0, {self.limit}]")
        out = ns == 2
        odd = (ns & 1).astype(bool) & (ns >= 3)
        i = (ns[odd] - 3) >> 1
        out[odd] = ((self.bits[i >> 3] >> (i & 7).astype(np.uint8)) & 1) == 0
        return out

    def pi(self, x: int) -> int:
        """Number of primes <= x."""
        self._check(x)
        if x < 3:
            return int(x == 2)
        i = (x - 3) >> 1  # flag index of the largest odd <= x
        byte, bit = i >> 3, i & 7
        mask = (1 << (bit + 1)) - 1
        composites = int(_POPCOUNT[self.bits[byte] & mask])
        return 1 + int(self.rank[byte]) + (bit + 1 - composites)

    def pi_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if xs.size and (xs.min() < 0 or xs.max() > self.limit):
            raise OutOfRangeError(f"values outside sieve coverage [0, {self.limit}]")
        out = (xs >= 2).astype(np.int64)
        big = xs >= 3
        i = (xs[big] - 3) >> 1
        byte, bit = i >> 3, i & 7
        mask = ((1 << (bit + 1)) - 1).astype(np.uint8)
        composites = _POPCOUNT[self.bits[byte] & mask].astype(np.int64)
        out[big] += self.rank[byte].astype(np.int64) + (bit + 1 - composites)
        return out

    def odd_prime_flags(self, lo: int, hi: int) -> np.ndarray:
        """Boolean primality of the odd numbers in ``[lo, hi]``.

        ``lo`` must be odd and >= 1; element ``k`` describes ``lo + 2k``.
        """
        if lo < 1 or not lo & 1:
            raise InvalidArgumentError("lo must be an odd positive integer")
        self._check(hi)
        if hi < lo:
            return np.zeros(0, dtype=bool)
        hi -= not hi & 1
        out = np.zeros((hi - lo) // 2 + 1, dtype=bool)
        start = max(lo, 3)
        if start > hi:
            return out
        i0, i1 = (start - 3) >> 1, (hi - 3) >> 1
        b0, b1 = i0 >> 3, i1 >> 3
        flags = np.unpackbits(self.bits[b0 : b1 + 1], bitorder="little")
        flags = flags[i0 - 8 * b0 : i1 - 8 * b0 + 1]
        out[(start - lo) // 2 :] = flags == 0
        return out

    def primes(self, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """Ascending array of the primes in ``[lo, hi]``."""
        hi = self.limit if hi is None else hi
        self._check(hi)
        lo = max(lo, 0)
        head = [2] if lo <= 2 <= hi else []
        olo = max(lo | 1, 3)
        if olo > hi:
            return np.array(head, dtype=np.int64)
        flags = self.odd_prime_flags(olo, hi)
        odd = olo + 2 * np.flatnonzero(flags).astype(np.int64)
        if head:
            return np.concatenate([np.array(head, dtype=np.int64), odd])
        return odd

    def next_prime_above(self, n: int) -> int | None:
        """Smallest prime > n within coverage, or None."""
        m = n + 1
        while m <= self.limit:
            if self.is_prime(m):
                return m
            m += 1
        return None


def build_sieve(
    limit: int,
    segment_size: int = SEGMENT_SIZE,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> SieveTable:
    """Segmented odd-only sieve of Eratosthenes up to ``limit`` inclusive.

    Peak scratch memory is one boolean segment of ``segment_size`` flags,
    regardless of ``limit``.
    """
    if limit < 3:
        raise InvalidArgumentError(f"sieve limit must be >= 3, got {limit}")
    if segment_size < 8 or segment_size % 8:
        raise InvalidArgumentError("segment_size must be a positive multiple of 8")
    nbytes = _sieve_bytes(limit)
    needed = 5 * nbytes + segment_size + 8
    if needed > memory_budget:
        raise ResourceLimitError(
            f"sieve up to {limit} needs ~{needed} bytes, budget is {memory_budget}"
        )

    total = 8 * nbytes
    n_odd = (limit - 1) // 2
    base = small_primes(math.isqrt(limit))[1:]
    bits = np.empty(nbytes, dtype=np.uint8)
    for seg in range(0, total, segment_size):
        seg_len = min(segment_size, total - seg)
        comp = np.zeros(seg_len, dtype=bool)
        lo = 2 * seg + 3
        hi = lo + 2 * (seg_len - 1)
        for p in base:
            p = int(p)
            sq = p * p
            if sq > hi:
                break
            m = max(sq, -(-lo // p) * p)
            if not m & 1:
                m += p
            comp[(m - lo) >> 1 :: p] = True
        if seg + seg_len > n_odd:
            comp[max(n_odd - seg, 0) :] = True  # padding past limit
        bits[seg >> 3 : (seg + seg_len) >> 3] = np.packbits(comp, bitorder="little")

    rank = np.zeros(nbytes + 1, dtype=np.uint32)
    np.cumsum(8 - _POPCOUNT[bits].astype(np.uint32), out=rank[1:])
    bits.setflags(write=False)
    rank.setflags(write=False)
    return SieveTable(limit=limit, bits=bits, rank=rank)


@dataclass(frozen=True)
class Factorization:
    base: int
    factors: tuple[tuple[int, int], ...]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def product(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    def totient(self) -> int:
        phi = self.base
        for p, _ in self.factors:
            phi = phi // p * (p - 1)
        return phi


@dataclass(frozen=True, eq=False)
class SpfTable:
    """Smallest prime factor of every integer in ``[2, limit]``."""

    limit: int
    spf: np.ndarray

    def smallest_factor(self, n: int) -> int:
        if n < 2 or n > self.limit:
            raise OutOfRangeError(f"{n} outside SPF coverage [2, {self.limit}]")
        return int(self.spf[n])

    def factorize(self, n: int) -> Factorization:
        if n < 2:
            raise InvalidArgumentError(f"cannot factorize {n} (< 2)")
        if n > self.limit:
            raise OutOfRangeError(f"{n} outside SPF coverage [2, {self.limit}]")
        factors: list[tuple[int, int]] = []
        m = n
        while m > 1:
            p = int(self.spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        return Factorization(n, tuple(factors))

    def totient(self, n: int) -> int:
        if n < 1:
            raise InvalidArgumentError(f"totient undefined for {n}")
        if n > self.limit:
            raise OutOfRangeError(f"{n} outside SPF coverage [2, {self.limit}]")
        if n == 1:
            return 1
        return self.factorize(n).totient()


def build_spf(limit: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SpfTable:
    if limit < 2:
        raise InvalidArgumentError(f"SPF limit must be >= 2, got {limit}")
    if limit >= 2**31 or 4 * (limit + 1) > memory_budget:
        raise ResourceLimitError(f"SPF table up to {limit} exceeds budget {memory_budget}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[2::2] = 2
    for p in range(3, math.isqrt(limit) + 1, 2):
        if spf[p] == 0:
            view = spf[p * p :: 2 * p]
            view[view == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    spf.setflags(write=False)
    return SpfTable(limit=limit, spf=spf)


def factorize_any(n: int, spf: SpfTable, table: SieveTable) -> Factorization:
    """Factorize ``n`` even when it lies beyond ``spf.limit``.

    Small factors are stripped by trial division with the sieve's primes
    until the cofactor fits in the SPF table (or is proven prime).
    """
    if n <= spf.limit:
        return spf.factorize(n)
    if math.isqrt(n) > table.limit:
        raise OutOfRangeError(f"cannot factorize {n}: sieve too small for trial division")
    factors: list[tuple[int, int]] = []
    m = n
    for p in _iter_primes(table):
        if m <= spf.limit or p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    if m > 1:
        if m <= spf.limit:
            factors.extend(spf.factorize(m).factors)
        else:
            factors.append((m, 1))
    return Factorization(n, tuple(factors))


def _iter_primes(table: SieveTable, chunk: int = 4096) -> Iterator[int]:
    lo = 0
    while lo <= table.limit:
        hi = min(lo + chunk, table.limit)
        yield from table.primes(lo, hi).tolist()
        lo = hi + 1
