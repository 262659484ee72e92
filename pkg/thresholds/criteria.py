"""Closed-form winner criteria and bias-threshold bounds.

Criterion arithmetic stays in exact integers / fractions; floating point is
only used for the square-root bounds, which drop their o(1) terms and are
therefore labelled "asymptotic bound" wherever they are reported.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

import numpy as np

from src.tournament import w_closed_form
from thresholds.outputs import BiasRow


# ------------------------------------------------------------------
# Potential criteria
# ------------------------------------------------------------------
def erdos_selfridge_breaker(num_sets: int, s: int) -> bool:
    """Breaker (second player) wins an s-uniform game with fewer than 2^(s-1) sets."""
    if s < 1:
        raise ValueError(f"set size s must be >= 1, got {s}")
    return num_sets < 2 ** (s - 1)


def es_biased_breaker(set_sizes: Iterable[int], b: int) -> bool:
    """Biased potential criterion: sum (1+b)^-|A| < 1/(1+b) means Breaker wins (1:b)."""
    if b < 1:
        raise ValueError(f"bias b must be >= 1, got {b}")
    potential = sum((Fraction(1, (1 + b) ** size) for size in set_sizes), Fraction(0))
    return potential < Fraction(1, 1 + b)


def es_residual_breaker_win(near: int, fresh: int, b: int) -> bool:
    """:func:`es_biased_breaker` for a 3-uniform residual game with Maker to move.

    ``near`` counts live sets missing two elements (one already Maker's),
    ``fresh`` live sets missing all three. Scaled by (1+b)^3 the criterion is
    ``near*(1+b) + fresh < (1+b)^2``.
    """
    q = 1 + b
    return near * q + fresh < q * q


def beck_maker_biased(
    a: int, b: int, num_sets: int, set_size: int, delta2: int, board_size: int
) -> bool:
    """Maker (first player) wins (a:b) when
    ``num_sets * (a/(a+b))^set_size > a^2 b^2 / (a+b)^3 * delta2 * board_size``.
    """
    if min(a, b, num_sets, set_size, delta2, board_size) < 1:
        raise ValueError("all arguments of the Maker criterion must be positive")
    lhs = num_sets * Fraction(a, a + b) ** set_size
    rhs = Fraction(a * a * b * b, (a + b) ** 3) * delta2 * board_size
    return lhs > rhs


def beck_maker_unbiased(num_sets: int, s: int, delta2: int, board_size: int) -> bool:
    """(1:1) form: |F| > 2^(s-3) * delta2 * |X|."""
    return num_sets > Fraction(2) ** (s - 3) * delta2 * board_size


# ------------------------------------------------------------------
# Bias bounds on Π(n)
# ------------------------------------------------------------------
def bias_lower_bound(n: int) -> float:
    """sqrt(w(n) / C(n,2)); equals sqrt((n+1)/12) for odd n."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return math.sqrt(Fraction(w_closed_form(n), math.comb(n, 2)))


def bias_upper_bound_glazik(n: int) -> float:
    """sqrt(8n/3), asymptotic bound (o(1) term dropped)."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return math.sqrt(8 * n / 3)


def bias_bounds_table(ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (lower, upper) bounds for an integer array of n >= 3."""
    n = np.asarray(ns, dtype=np.int64)
    if (n < 3).any():
        raise ValueError("every n must be >= 3")
    w = np.where(n % 2 == 1, (n**3 - n) // 24, (n**3 - 4 * n) // 24)
    board = n * (n - 1) // 2
    return np.sqrt(w / board), np.sqrt(8.0 * n / 3.0)


def beck_maker_predicate(n: int, b: int) -> bool:
    """Maker criterion for the directed-triangle game on Π(n) at bias (1:b)."""
    return beck_maker_biased(1, b, w_closed_form(n), 3, 1, math.comb(n, 2))


def glazik_breaker_predicate(n: int, b: int) -> bool:
    """Undirected Breaker bound, transferred to the directed game."""
    return b >= bias_upper_bound_glazik(n)


def bias_rows(ns: Iterable[int], bs: Iterable[int]) -> list[BiasRow]:
    rows = []
    b_values = list(bs)
    for n in ns:
        w = w_closed_form(n)
        lower, upper = bias_lower_bound(n), bias_upper_bound_glazik(n)
        for b in b_values:
            rows.append(
                BiasRow(
                    n=n,
                    w=w,
                    board_size=math.comb(n, 2),
                    b=b,
                    lower_bound=lower,
                    upper_bound=upper,
                    es_guarantee=erdos_selfridge_breaker(w, 3),
                    beck_guarantee=beck_maker_predicate(n, b),
                )
            )
    return rows
