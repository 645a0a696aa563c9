"""Explicit analytic bounds: pi upper bound, phi lower bound, f(2N) and the s - h > f(2N) check.

``f(2N) = 2N / (1.781 lnln 2N + 3 / lnln 2N) - 2 - 2.510 * 2N / ln 2N``

is evaluated with the printed constants by default.  ``strict=True``
swaps in ``e^gamma`` and ``2 * 1.25506`` for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classification import CountSummary, EvenTarget
from .errors import DomainError, InvalidArgumentError, OutOfRangeError
from .sieve import SieveTable, SpfTable


@dataclass(frozen=True)
class AnalyticConstants:
    pi_coefficient: float = 1.25506
    f_first_coefficient: float = 1.781
    f_second_coefficient: float = 2.510
    f_additive: float = 3.0
    euler_gamma: float = 0.5772156649015329


PRINTED = AnalyticConstants()
STRICT = AnalyticConstants(
    f_first_coefficient=math.exp(PRINTED.euler_gamma),
    f_second_coefficient=2 * PRINTED.pi_coefficient,
)

F_MIN_ARGUMENT = 16
# threshold comparisons must clear this relative margin to count as decided
RELATIVE_MARGIN = 1e-6


def constants(strict: bool = False) -> AnalyticConstants:
    return STRICT if strict else PRINTED


def f_of(two_n: int, strict: bool = False) -> float:
    if two_n < F_MIN_ARGUMENT:
        raise DomainError(f"f(2N) needs 2N >= {F_MIN_ARGUMENT}, got {two_n}")
    c = constants(strict)
    x = float(two_n)
    ln = math.log(x)
    lnln = math.log(ln)
    return (
        x / (c.f_first_coefficient * lnln + c.f_additive / lnln)
        - 2.0
        - c.f_second_coefficient * x / ln
    )


def compare_with_margin(lhs: float, rhs: float, margin: float = RELATIVE_MARGIN) -> tuple[bool, bool]:
    """``(lhs > rhs, marginal)``.

    ``marginal`` is set when the two sides are closer than ``margin``
    relative to the larger magnitude, in which case the verdict is float
    noise and should not be trusted.
    """
    scale = max(abs(lhs), abs(rhs), 1.0)
    return lhs > rhs, abs(lhs - rhs) <= margin * scale


def pi_upper_bound(x: float) -> float:
    return PRINTED.pi_coefficient * x / math.log(x)


def phi_lower_bound(x: float) -> float:
    lnln = math.log(math.log(x))
    return x / (math.exp(PRINTED.euler_gamma) * lnln + 3.0 / lnln)


def check_pi_bound(table: SieveTable, x: int) -> bool:
    if x < 2:
        raise InvalidArgumentError(f"pi bound stated for x > 1, got {x}")
    if x > table.limit:
        raise OutOfRangeError(f"{x} exceeds sieve limit {table.limit}")
    return table.pi(x) < pi_upper_bound(x)


def check_phi_bound(spf: SpfTable, x: int) -> bool:
    if x < 3:
        raise InvalidArgumentError(f"phi bound stated for x >= 3, got {x}")
    return spf.totient(x) > phi_lower_bound(x)


@dataclass(frozen=True)
class BoundReport:
    target: EvenTarget
    f_value: float
    s_minus_h: int
    phi_minus_2_minus_2h: int
    eq1_holds: bool
    eq1_marginal: bool
    strict: bool = False


def check_eq1(counts: CountSummary, strict: bool = False) -> BoundReport:
    """Evaluate ``s - h > f(2N)``; the outcome is reported, not asserted."""
    f = f_of(counts.target.value, strict=strict)
    s_minus_h = counts.s - counts.h
    holds, marginal = compare_with_margin(float(s_minus_h), f)
    return BoundReport(
        target=counts.target,
        f_value=f,
        s_minus_h=s_minus_h,
        phi_minus_2_minus_2h=counts.phi_2n - 2 - 2 * counts.h,
        eq1_holds=holds,
        eq1_marginal=marginal,
        strict=strict,
    )


def scan_f_monotonic(grid, strict: bool = False) -> list[tuple[int, float, bool | None]]:
    """f along an ascending grid, flagging whether each point increased.

    The first point has no predecessor and gets ``None``.  A step only
    counts as an increase if it clears :data:`RELATIVE_MARGIN`.
    """
    grid = [int(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidArgumentError("grid must be strictly ascending")
    if grid and grid[0] < F_MIN_ARGUMENT:
        raise DomainError(f"grid points must be >= {F_MIN_ARGUMENT}")
    out: list[tuple[int, float, bool | None]] = []
    prev = None
    for g in grid:
        f = f_of(g, strict=strict)
        if prev is None:
            flag = None
        else:
            up, marginal = compare_with_margin(f, prev)
            flag = up and not marginal
        out.append((g, f, flag))
        prev = f
    return out


def geometric_grid(lo: float, hi: float, points: int) -> list[int]:
    """``points`` integers spaced geometrically in ``(lo, hi]``."""
    if points < 1 or not 0 < lo < hi:
        raise InvalidArgumentError("need points >= 1 and 0 < lo < hi")
    ratios = np.geomspace(lo, hi, points + 1)[1:]
    grid = sorted(set(int(round(v)) for v in ratios))
    return [g for g in grid if lo < g <= hi]
