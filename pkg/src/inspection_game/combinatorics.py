"""Exact binomial sums behind the closed-form solution.

``s_beta`` is the generalized Pascal triangle: it obeys the binomial
addition rule but carries ``(1 + beta)**n`` on its diagonal.  With
``beta = b`` it gives the inspection weights, with ``beta = -a`` the
inspector's own weights in the non-zero-sum game.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

__all__ = ["binom", "s_beta", "s_alt", "t_value"]

# unbounded unless set; the caches only grow with distinct (n, m, beta) inputs
_CACHE_SIZE = int(os.environ.get("INSPECTION_GAME_CACHE_SIZE", "0")) or None


def binom(n: int, m: int) -> int:
    """Binomial coefficient, zero outside ``0 <= m <= n``."""
    if n < 0:
        raise ValueError(f"binom needs n >= 0, got n={n}")
    if m < 0 or m > n:
        return 0
    return comb(n, m)


@lru_cache(maxsize=_CACHE_SIZE)
def _s_cached(n: int, m: int, beta: Fraction) -> Fraction:
    if m < 0:
        return Fraction(0)
    if m >= n:
        return beta ** (m - n) * (1 + beta) ** n
    total = Fraction(0)
    power = Fraction(1)
    # i runs from m down to 0 so beta**(m-i) grows by one factor per step
    for i in range(m, -1, -1):
        total += comb(n, i) * power
        power *= beta
    return total


def s_beta(n: int, m: int, beta) -> Fraction:
    """Sum over i=0..m of C(n, i) * beta**(m - i), for any integer m.

    >>> s_beta(5, 2, 0)
    Fraction(10, 1)
    >>> s_beta(3, 3, 1)
    Fraction(8, 1)
    """
    if n < 0:
        raise ValueError(f"s_beta needs n >= 0, got n={n}")
    return _s_cached(n, m, Fraction(beta))


def s_alt(n: int, m: int, beta) -> Fraction:
    """Second representation: sum over i=0..m of C(n-1-i, m-i) * (1+beta)**i.

    Only valid for ``0 <= m <= n``; for n = m = 0 the single term is
    C(-1, 0) = 1.
    """
    if not 0 <= m <= n:
        raise ValueError(f"s_alt needs 0 <= m <= n, got n={n}, m={m}")
    beta = Fraction(beta)
    total = Fraction(0)
    for i in range(m + 1):
        top = n - 1 - i
        # C(x, 0) = 1 for every x, including x = -1
        coeff = 1 if i == m else binom(top, m - i)
        total += coeff * (1 + beta) ** i
    return total


def t_value(n: int, m: int, rewards: Sequence) -> Fraction:
    """Reward-weighted binomial sum for the game value numerator.

    ``rewards`` lists the remaining rewards first-violation-first, so
    ``rewards[i - 1]`` is paid for the i-th successful violation and is
    weighted by C(n - i, m).
    """
    if n < 0:
        raise ValueError(f"t_value needs n >= 0, got n={n}")
    return _t_cached(n, m, tuple(rewards[:n]))


@lru_cache(maxsize=_CACHE_SIZE)
def _t_cached(n: int, m: int, rewards: tuple) -> Fraction:
    total = 0
    for i, r in enumerate(rewards, start=1):
        c = binom(n - i, m)
        if c and r:
            total += c * r
    return Fraction(total)
