"""Tests for Π(7) copies in random tournaments and the Monte-Carlo runs."""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import pytest

from src.experiments import (
    copy_probability,
    count_embeddings,
    expected_copies,
    find_embedding,
    iter_embeddings,
    mc_embedding_probability,
    mc_maker_win,
    orientation_counts,
    proportion_interval,
)
from src.tournament import Tournament, build_parity, build_transitive, sample_random


# ------------------------------------------------------------------
# Helpers
# ------------------------------------------------------------------
def _brute_force_copies(t: Tournament) -> list[tuple[int, ...]]:
    pattern = build_parity(7)
    return [c for c in combinations(range(1, t.n + 1), 7) if t.induced(c) == pattern]


# ==================================================================
# TestCopyProbability
# ==================================================================
class TestCopyProbability:
    """Exact copy probability and expected copy count."""

    def test_orientation_counts(self) -> None:
        assert orientation_counts() == (12, 9)

    def test_fair_coin(self) -> None:
        assert copy_probability(0.5) == 2.0**-21

    def test_biased_coin(self) -> None:
        assert copy_probability(0.25) == pytest.approx(0.25**12 * 0.75**9)

    def test_degenerate_p_rejected(self) -> None:
        for p in (0.0, 1.0):
            with pytest.raises(ValueError, match="strictly between"):
                copy_probability(p)

    def test_expected_copies(self) -> None:
        assert expected_copies(30, 0.5) == pytest.approx(math.comb(30, 7) / 2**21)
        assert expected_copies(6, 0.5) == 0.0


# ==================================================================
# TestEmbeddings
# ==================================================================
class TestEmbeddings:
    """Order-preserving copies of Π(7)."""

    def test_parity_seven_is_its_own_copy(self) -> None:
        assert find_embedding(build_parity(7)) == (1, 2, 3, 4, 5, 6, 7)

    def test_transitive_has_none(self) -> None:
        assert find_embedding(build_transitive(7)) is None
        assert find_embedding(build_parity(6)) is None

    def test_parity_eight_has_two(self) -> None:
        assert list(iter_embeddings(build_parity(8))) == [
            (1, 2, 3, 4, 5, 6, 7),
            (2, 3, 4, 5, 6, 7, 8),
        ]
        assert count_embeddings(build_parity(8)) == 2

    def test_matches_brute_force(self) -> None:
        boards = [build_parity(9), build_parity(10)]
        boards += [sample_random(10, p, seed) for seed in range(5) for p in (0.3, 0.5, 0.7)]
        for t in boards:
            assert list(iter_embeddings(t)) == _brute_force_copies(t)

    def test_sample_mean_matches_expectation(self) -> None:
        n, trials = 14, 10_000
        rng = np.random.default_rng(314)
        counts = np.array([count_embeddings(sample_random(n, 0.5, rng)) for _ in range(trials)])
        se = counts.std(ddof=1) / math.sqrt(trials)
        assert abs(counts.mean() - expected_copies(n, 0.5)) <= 3 * se


# ==================================================================
# TestIntervals
# ==================================================================
class TestIntervals:
    """Exact binomial intervals."""

    def test_nothing_decided(self) -> None:
        assert proportion_interval(0, 0) == (0.0, 1.0)

    def test_all_successes(self) -> None:
        low, high = proportion_interval(200, 200)
        assert high == 1.0
        assert low == pytest.approx(0.025 ** (1 / 200), rel=1e-6)

    def test_interval_contains_estimate(self) -> None:
        low, high = proportion_interval(37, 100, 0.9)
        assert low < 0.37 < high


# ==================================================================
# TestMonteCarlo
# ==================================================================
class TestMonteCarlo:
    """Seeded Monte-Carlo estimates."""

    def test_embedding_probability_large_n(self) -> None:
        est = mc_embedding_probability(60, 0.5, 200, seed=1)
        assert est.trials == 200
        assert est.estimate >= 0.95
        assert est.ci_low <= est.estimate <= est.ci_high

    def test_embedding_probability_small_n(self) -> None:
        est = mc_embedding_probability(6, 0.5, 20, seed=1)
        assert est.successes == 0
        assert est.ci_low == 0.0

    def test_seeded_reruns_agree(self) -> None:
        first = mc_embedding_probability(20, 0.5, 30, seed=42)
        again = mc_embedding_probability(20, 0.5, 30, seed=42)
        assert first == again

    def test_parallel_matches_serial(self) -> None:
        serial = mc_embedding_probability(20, 0.5, 16, seed=7)
        parallel = mc_embedding_probability(20, 0.5, 16, seed=7, jobs=2)
        assert serial == parallel

    def test_maker_wins_found_copies(self) -> None:
        est = mc_maker_win(40, 0.5, 8, seed=3)
        assert est.successes + est.unknowns + est.no_copy == est.trials
        assert est.decided > 0
        assert est.estimate == 1.0

    def test_fifty_vertex_boards(self) -> None:
        copies = mc_embedding_probability(50, 0.5, 200, seed=20240611)
        assert copies.ci_low >= 0.95
        wins = mc_maker_win(50, 0.5, 25, seed=20240611)
        assert wins.no_copy == 0
        assert wins.unknowns <= 2
        assert wins.successes == wins.decided
        assert wins.estimate == 1.0

    def test_maker_rejects_degenerate_p(self) -> None:
        with pytest.raises(ValueError, match="strictly between"):
            mc_maker_win(20, 0.0, 5, seed=0)

    def test_bad_trial_count(self) -> None:
        with pytest.raises(ValueError, match="at least one trial"):
            mc_embedding_probability(20, 0.5, 0, seed=0)
