"""G-system construction, Goldbach partition counts and the chain audit.

Two partition counts are kept apart throughout:

* ``r``      unordered prime pairs ``p <= q`` with ``p + q = 2N`` (``2 + 2``
  and ``p + p`` included);
* ``r_star`` pairs of distinct odd primes ``3 <= p < q``.

They differ only by the ``p = q = N`` pair, so ``r = r_star + [N prime]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .classification import Classification, EvenTarget, as_target
from .errors import (
    AuditNotApplicableError,
    EmptySystemError,
    InternalInconsistencyError,
    OutOfRangeError,
)
from .sieve import SieveTable


@dataclass(frozen=True)
class GEquation:
    """``Gamma_j: 2N - P_j = a_{n_j}``."""

    j: int
    p: int
    complement: int
    complement_is_prime: bool


@dataclass(frozen=True)
class GSystem:
    target: EvenTarget
    equations: tuple[GEquation, ...]

    def __len__(self) -> int:
        return len(self.equations)

    @property
    def complements(self) -> list[int]:
        return [eq.complement for eq in self.equations]

    @property
    def all_composite(self) -> bool:
        """True iff every complement is composite, i.e. no distinct odd partition."""
        return not any(eq.complement_is_prime for eq in self.equations)


@dataclass(frozen=True)
class PartitionCount:
    target: EvenTarget
    r: int
    r_star: int


@dataclass(frozen=True)
class ChainAuditReport:
    """Unconditional evaluation of the inequality rows of the contradiction argument.

    ``forward_*`` rows compare ``2N - X_j`` against ``P_j`` (claimed ``<=``),
    ``backward_*`` rows compare ``2N - X_{s-j}`` against ``P_{h-j}``
    (claimed ``>=``).  Rows that would need an ``X`` or ``P`` index outside
    ``1..s`` / ``1..h`` are listed as not applicable and never counted as
    holding.
    """

    target: EvenTarget
    h: int
    s: int
    premise_holds: bool
    top_relation_holds: bool
    forward_checked: int
    forward_violations: tuple[int, ...]
    forward_not_applicable: tuple[int, ...]
    backward_checked: int
    backward_violations: tuple[int, ...]
    backward_not_applicable: tuple[int, ...]
    floor_last_holds: bool
    floor_second_last_holds: bool | None
    h_minus_s_plus_1: int


def build_gsystem(classification: Classification) -> GSystem:
    h = classification.h
    if h == 0:
        raise EmptySystemError(
            f"no primes of type P for 2N = {classification.target.value}"
        )
    p = classification.p_primes
    comp = classification.target.value - p
    # complements lie in A, so a complement is prime iff it is a P prime
    pos = np.searchsorted(p, comp)
    is_p = (pos < h) & (p[np.minimum(pos, h - 1)] == comp)
    equations = tuple(
        GEquation(j, pj, cj, bool(isp))
        for j, pj, cj, isp in zip(range(1, h + 1), p.tolist(), comp.tolist(), is_p.tolist())
    )
    return GSystem(classification.target, equations)


def _check_cover(table: SieveTable, target: EvenTarget) -> None:
    if target.value > table.limit:
        raise OutOfRangeError(f"target {target.value} exceeds sieve limit {table.limit}")


def count_partitions(table: SieveTable, target) -> PartitionCount:
    target = as_target(target)
    _check_cover(table, target)
    n, two_n = target.half, target.value
    ps = table.primes(2, n)
    hit = table.is_prime_many(two_n - ps)
    r = int(hit.sum())
    r_star = int((hit & (ps >= 3) & (ps < n)).sum())
    return PartitionCount(target, r, r_star)


def distinct_odd_witness(table: SieveTable, target) -> int | None:
    """Smallest odd prime ``p`` with ``2N - p`` a larger prime, else None."""
    target = as_target(target)
    _check_cover(table, target)
    n, two_n = target.half, target.value
    p = 3
    while p < n:
        if table.is_prime(p) and table.is_prime(two_n - p):
            return p
        p += 2
    return None


def has_distinct_odd_partition(table: SieveTable, target) -> bool:
    return distinct_odd_witness(table, target) is not None


def distinct_odd_witnesses(table: SieveTable, targets) -> np.ndarray:
    """Vectorised :func:`distinct_odd_witness`; 0 marks "no witness"."""
    targets = np.asarray(targets, dtype=np.int64)
    out = np.zeros(targets.size, dtype=np.int64)
    if targets.size == 0:
        return out
    if targets.max() > table.limit:
        raise OutOfRangeError(f"targets exceed sieve limit {table.limit}")
    todo = np.arange(targets.size)
    max_half = int(targets.max()) // 2
    lo = 3
    while todo.size and lo < max_half:
        hi = min(2 * lo + 64, max_half)
        for p in table.primes(lo, hi).tolist():
            q = targets[todo] - p
            ok = q > p
            ok[ok] = table.is_prime_many(q[ok])
            out[todo[ok]] = p
            todo = todo[~ok]
            if not todo.size:
                break
        lo = hi + 1
    return out


def partition_counts_range(table: SieveTable, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(targets, r, r_star)`` for every even target in ``[lo, hi]``.

    Ordered odd-prime pair counts are obtained as a convolution of the odd
    prime indicator with itself, done in bounded-size FFT chunks so memory
    stays proportional to the range width rather than ``hi``.
    """
    lo = as_target(lo).value
    hi = as_target(hi).value
    if hi < lo:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    if hi > table.limit:
        raise OutOfRangeError(f"targets exceed sieve limit {table.limit}")
    # odd m = 2i + 1 <-> i;  p + q = 2N <-> i + j = N - 1 = k
    ka, kb = lo // 2 - 1, hi // 2 - 1
    width = kb - ka + 1
    u = table.odd_prime_flags(1, hi - 1).astype(np.float64)
    chunk = max(width, 1 << 15)
    acc = np.zeros(width, dtype=np.float64)
    for c0 in range(0, kb + 1, chunk):
        c1 = min(c0 + chunk, kb + 1)
        j0 = max(0, ka - (c1 - 1))
        j1 = kb - c0
        if j1 < j0:
            continue
        conv = fftconvolve(u[c0:c1], u[j0 : j1 + 1])
        base = c0 + j0  # k of conv[0]
        s0 = max(ka, base)
        s1 = min(kb, base + conv.size - 1)
        if s1 >= s0:
            acc[s0 - ka : s1 - ka + 1] += conv[s0 - base : s1 - base + 1]
    ordered = np.rint(acc)
    if width and np.abs(acc - ordered).max() > 0.25:
        raise InternalInconsistencyError("FFT pair counts not close to integers")
    ordered = ordered.astype(np.int64)
    targets = np.arange(lo, hi + 1, 2, dtype=np.int64)
    half_prime = table.is_prime_many(targets // 2)
    half_odd_prime = half_prime & (targets // 2 >= 3)
    r_star = (ordered - half_odd_prime) // 2
    r = r_star + half_prime
    return targets, r, r_star


def audit_chain(classification: Classification, gsystem: GSystem) -> ChainAuditReport:
    h, s = classification.h, classification.s
    two_n = classification.target.value
    if s == 0:
        raise AuditNotApplicableError(f"no composites of type P for 2N = {two_n}")
    if h == 0:
        raise EmptySystemError(f"no primes of type P for 2N = {two_n}")
    P, X = classification.p_primes, classification.x_composites
    m = min(s, h)

    # forward rows j = 2..m: claimed 2N - X_j <= P_j
    j = np.arange(2, m + 1)
    fwd_bad = j[two_n - X[j - 1] > P[j - 1]]
    # backward rows j = 0..m-1: claimed 2N - X_{s-j} >= P_{h-j}
    j = np.arange(0, m)
    bwd_bad = j[two_n - X[s - j - 1] < P[h - j - 1]]

    return ChainAuditReport(
        target=classification.target,
        h=h,
        s=s,
        premise_holds=gsystem.all_composite,
        top_relation_holds=bool(two_n - X[0] == P[0]),
        forward_checked=max(m - 1, 0),
        forward_violations=tuple(fwd_bad.tolist()),
        forward_not_applicable=tuple(range(s + 1, h + 1)),
        backward_checked=m,
        backward_violations=tuple(bwd_bad.tolist()),
        backward_not_applicable=tuple(range(h, s)),
        floor_last_holds=bool(two_n - P[h - 1] >= X[s - 1]),
        floor_second_last_holds=(
            bool(two_n - P[h - 2] >= X[s - 2]) if s >= 2 and h >= 2 else None
        ),
        h_minus_s_plus_1=h - s + 1,
    )
