"""Tests for the potential criteria and the bias bounds."""
from __future__ import annotations

import math
from itertools import product

import numpy as np
import pytest

from src.tournament import w_closed_form
from thresholds.criteria import (
    beck_maker_biased,
    beck_maker_predicate,
    beck_maker_unbiased,
    bias_bounds_table,
    bias_lower_bound,
    bias_rows,
    bias_upper_bound_glazik,
    erdos_selfridge_breaker,
    es_biased_breaker,
    es_residual_breaker_win,
    glazik_breaker_predicate,
)


# ==================================================================
# TestPotentialCriteria
# ==================================================================
class TestPotentialCriteria:
    """Erdős–Selfridge style Breaker criteria."""

    def test_unbiased_threshold(self) -> None:
        assert erdos_selfridge_breaker(3, 3)
        assert not erdos_selfridge_breaker(4, 3)
        with pytest.raises(ValueError, match="set size"):
            erdos_selfridge_breaker(1, 0)

    def test_biased_single_triangle(self) -> None:
        assert es_biased_breaker([3], 1)
        assert not es_biased_breaker([3] * 4, 1)
        assert es_biased_breaker([3] * 8, 2)
        with pytest.raises(ValueError, match="bias"):
            es_biased_breaker([3], 0)

    def test_residual_form_matches_general_form(self) -> None:
        for near, fresh, b in product(range(6), range(12), range(1, 4)):
            sizes = [2] * near + [3] * fresh
            assert es_residual_breaker_win(near, fresh, b) == es_biased_breaker(sizes, b)


# ==================================================================
# TestMakerCriteria
# ==================================================================
class TestMakerCriteria:
    """Beck-style Maker criteria on Π(n)."""

    def test_unbiased_switches_after_eleven(self) -> None:
        for n in range(3, 12, 2):
            assert not beck_maker_unbiased(w_closed_form(n), 3, 1, math.comb(n, 2))
        for n in range(13, 40, 2):
            assert beck_maker_unbiased(w_closed_form(n), 3, 1, math.comb(n, 2))

    def test_biased_agrees_with_simplified_form(self) -> None:
        rng = np.random.default_rng(99)
        for _ in range(10_000):
            n = int(rng.integers(3, 400))
            b = int(rng.integers(1, 30))
            assert beck_maker_predicate(n, b) == (w_closed_form(n) > b * b * math.comb(n, 2))

    def test_biased_boundary_at_forty_seven(self) -> None:
        assert beck_maker_predicate(47, 1)
        assert not beck_maker_predicate(47, 2)

    def test_non_positive_arguments(self) -> None:
        with pytest.raises(ValueError, match="positive"):
            beck_maker_biased(1, 0, 10, 3, 1, 10)


# ==================================================================
# TestBiasBounds
# ==================================================================
class TestBiasBounds:
    """Lower and upper bias bounds."""

    def test_lower_bound_at_forty_seven(self) -> None:
        assert bias_lower_bound(47) == 2.0

    def test_lower_bound_odd_closed_form(self) -> None:
        for n in range(3, 200, 2):
            assert bias_lower_bound(n) == pytest.approx(math.sqrt((n + 1) / 12))

    def test_lower_below_upper_everywhere(self) -> None:
        lower, upper = bias_bounds_table(np.arange(3, 10**6 + 1))
        assert (lower < upper).all()

    def test_table_matches_scalars(self) -> None:
        ns = np.array([3, 4, 10, 47, 1001])
        lower, upper = bias_bounds_table(ns)
        for n, lo, hi in zip(ns, lower, upper):
            assert lo == pytest.approx(bias_lower_bound(int(n)))
            assert hi == pytest.approx(bias_upper_bound_glazik(int(n)))

    def test_small_n_rejected(self) -> None:
        with pytest.raises(ValueError, match="n must be >= 3"):
            bias_lower_bound(2)
        with pytest.raises(ValueError, match=">= 3"):
            bias_bounds_table(np.array([2, 5]))

    def test_breaker_predicate(self) -> None:
        assert glazik_breaker_predicate(6, 4)
        assert not glazik_breaker_predicate(6, 3)


# ==================================================================
# TestBiasRows
# ==================================================================
class TestBiasRows:
    """Rows of the bias table."""

    def test_grid_shape(self) -> None:
        rows = bias_rows(range(7, 12), range(1, 4))
        assert len(rows) == 15
        assert [(r.n, r.b) for r in rows[:3]] == [(7, 1), (7, 2), (7, 3)]

    def test_row_contents(self) -> None:
        (row,) = bias_rows([47], [1])
        assert row.w == 4324
        assert row.board_size == 1081
        assert row.lower_bound == 2.0
        assert row.beck_guarantee
        assert not row.es_guarantee
        assert row.bound_kind == "asymptotic bound"
