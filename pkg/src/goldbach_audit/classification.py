"""Type-Q primes, type-P primes, type-P composites and type-P integers of 2N.

For an even target ``2N``:

* Q primes divide ``2N`` (ascending, ``Q_1 = 2``);
* P primes are the primes below ``2N - 2`` that do not divide ``2N``
  (ascending, ``P_1 < ... < P_h``);
* X composites are the composites below ``2N - 2`` built only from P primes
  (descending, ``X_1 > ... > X_s``);
* A is the union of P and X (descending).

Equivalently A is every ``a`` in ``[3, 2N - 3]`` coprime to ``2N``, which is
how it is computed here: no element of A is ever factorized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistencyError, InvalidArgumentError, OutOfRangeError
from .sieve import SieveTable, SpfTable, factorize_any


@dataclass(frozen=True)
class EvenTarget:
    value: int

    def __post_init__(self) -> None:
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise InvalidArgumentError(f"target must be an integer, got {v!r}")
        if v < 4 or v % 2:
            raise InvalidArgumentError(f"target must be even and >= 4, got {v}")
        object.__setattr__(self, "value", int(v))

    @property
    def half(self) -> int:
        """N, where the target is 2N."""
        return self.value // 2

    def __int__(self) -> int:
        return self.value


def as_target(target) -> EvenTarget:
    return target if isinstance(target, EvenTarget) else EvenTarget(target)


def _frozen(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Classification:
    target: EvenTarget
    q_primes: tuple[int, ...]
    p_primes: np.ndarray  # ascending
    x_composites: np.ndarray  # descending
    a_integers: np.ndarray  # descending

    @property
    def h(self) -> int:
        return len(self.p_primes)

    @property
    def s(self) -> int:
        return len(self.x_composites)

    @property
    def t(self) -> int:
        return len(self.q_primes)

    def P(self, j: int) -> int:
        """``P_j`` with the 1-based index used throughout the proof."""
        if not 1 <= j <= self.h:
            raise IndexError(f"P_{j} undefined (h = {self.h})")
        return int(self.p_primes[j - 1])

    def X(self, j: int) -> int:
        """``X_j``, 1-based; ``X_1`` is the largest composite of type P."""
        if not 1 <= j <= self.s:
            raise IndexError(f"X_{j} undefined (s = {self.s})")
        return int(self.x_composites[j - 1])


@dataclass(frozen=True)
class CountSummary:
    target: EvenTarget
    h: int
    s: int
    phi_2n: int
    pi_2n_minus_3: int
    omega_odd: int


def _check_cover(table: SieveTable, target: EvenTarget) -> None:
    if target.value > table.limit:
        raise OutOfRangeError(f"target {target.value} exceeds sieve limit {table.limit}")


def classify(table: SieveTable, spf: SpfTable, target) -> Classification:
    target = as_target(target)
    _check_cover(table, target)
    two_n = target.value
    q = factorize_any(two_n, spf, table).primes

    top = two_n - 3
    if top < 3:
        empty = _frozen(np.zeros(0, dtype=np.int64))
        return Classification(target, q, empty, empty, empty)

    coprime = np.ones((top - 1) // 2, dtype=bool)  # flag k <-> odd 3 + 2k
    for p in q[1:]:
        coprime[(p - 3) // 2 :: p] = False
    prime = table.odd_prime_flags(3, top)

    def odd_values(mask):
        return _frozen(2 * np.flatnonzero(mask) + 3)

    return Classification(
        target=target,
        q_primes=q,
        p_primes=odd_values(coprime & prime),
        x_composites=odd_values(coprime & ~prime)[::-1],
        a_integers=odd_values(coprime)[::-1],
    )


def fast_counts(table: SieveTable, spf: SpfTable, target) -> CountSummary:
    """h and s without materialising A.

    ``h = pi(2N - 3) - #{q | 2N prime, q <= 2N - 3}`` and
    ``s = phi(2N) - 2 - h``.
    """
    target = as_target(target)
    _check_cover(table, target)
    two_n = target.value
    fac = factorize_any(two_n, spf, table)
    pi_top = table.pi(two_n - 3)
    omega_odd = len(fac.factors) - 1
    h = pi_top - sum(1 for p in fac.primes if p <= two_n - 3)
    phi = fac.totient()
    return CountSummary(
        target=target,
        h=h,
        s=phi - 2 - h,
        phi_2n=phi,
        pi_2n_minus_3=pi_top,
        omega_odd=omega_odd,
    )


def bertrand_witness(table: SieveTable, target) -> int:
    """Smallest prime ``P_r`` of type P with ``N < P_r < 2N - 2``.

    Raises InternalInconsistencyError if none exists, which would
    contradict Bertrand's postulate.
    """
    target = as_target(target)
    if target.value <= 6:
        raise InvalidArgumentError(f"Bertrand witness needs 2N > 6, got {target.value}")
    _check_cover(table, target)
    n, two_n = target.half, target.value
    p = n + 1
    while p < two_n - 2:
        if table.is_prime(p) and two_n % p:
            return p
        p += 1
    raise InternalInconsistencyError(f"no prime of type P in ({n}, {two_n - 2})")
