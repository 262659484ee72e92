"""Random tournaments: Π(7)-copy probability, embeddings and Monte-Carlo runs."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np
from colorama import Fore, Style
from scipy.stats import binomtest

from src.hypergraph import build_system
from src.results import MCEstimate
from src.solver import DEFAULT_VERIFY_BUDGET, StrategyVerifier
from src.strategies import CycleHoppingMaker
from src.tournament import Tournament, build_parity, sample_random

COPY_SIZE = 7
DEFAULT_MC_BUDGET = 10_000_000
DEFAULT_CONFIDENCE = 0.95


@lru_cache(maxsize=1)
def _pattern() -> np.ndarray:
    return build_parity(COPY_SIZE).adjacency()


def _check_open_probability(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(
            f"p must lie strictly between 0 and 1, got {p} (T(n,{p}) is transitive and Breaker's)"
        )


# ------------------------------------------------------------------
# Exact quantities
# ------------------------------------------------------------------
def orientation_counts() -> tuple[int, int]:
    """(#pairs i<j oriented i -> j, #pairs oriented j -> i) in Π(7)."""
    bits = build_parity(COPY_SIZE).bits
    low_to_high = int(bits.sum())
    return low_to_high, int(bits.size) - low_to_high


def copy_probability(p: float) -> float:
    """Probability that a fixed 7-set of T(n, p) is an order-preserving copy of Π(7)."""
    _check_open_probability(p)
    low_to_high, high_to_low = orientation_counts()
    return p**low_to_high * (1 - p) ** high_to_low


def expected_copies(n: int, p: float) -> float:
    """C(n, 7) * q(p); zero below seven vertices."""
    q = copy_probability(p)
    if n < COPY_SIZE:
        return 0.0
    return math.comb(n, COPY_SIZE) * q


# ------------------------------------------------------------------
# Embedding search
# ------------------------------------------------------------------
def iter_embeddings(t: Tournament) -> Iterator[tuple[int, ...]]:
    """Increasing 7-tuples whose induced orientation matches Π(7), lexicographic."""
    if t.n < COPY_SIZE:
        return
    adj = t.adjacency()
    pattern = _pattern()
    index = np.arange(t.n)

    def extend(chosen: list[int], masks: list[np.ndarray]) -> Iterator[tuple[int, ...]]:
        k = len(chosen)
        if k == COPY_SIZE:
            yield tuple(v + 1 for v in chosen)
            return
        for v in np.flatnonzero(masks[0]):
            v = int(v)
            later = [
                mask & (adj[v] == pattern[k, j]) & (index > v)
                for j, mask in zip(range(k + 1, COPY_SIZE), masks[1:])
            ]
            if all(mask.any() for mask in later):
                yield from extend(chosen + [v], later)

    yield from extend([], [np.ones(t.n, dtype=bool)] * COPY_SIZE)


def find_embedding(t: Tournament) -> tuple[int, ...] | None:
    return next(iter_embeddings(t), None)


def count_embeddings(t: Tournament) -> int:
    return sum(1 for _ in iter_embeddings(t))


# ------------------------------------------------------------------
# Monte Carlo
# ------------------------------------------------------------------
def proportion_interval(
    successes: int, trials: int, confidence: float = DEFAULT_CONFIDENCE
) -> tuple[float, float]:
    """Exact (Clopper-Pearson) interval; (0, 1) when nothing was decided."""
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="exact")
    return float(ci.low), float(ci.high)


def _run_trials(
    worker: Callable[[tuple], str],
    payloads: list[tuple],
    jobs: int,
) -> list[str]:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, payloads))
    return [worker(payload) for payload in payloads]


def _embedding_trial(payload: tuple) -> str:
    n, p, seed = payload
    return "hit" if find_embedding(sample_random(n, p, seed)) is not None else "miss"


def _maker_trial(payload: tuple) -> str:
    n, p, seed, budget = payload
    t = sample_random(n, p, seed)
    copy = find_embedding(t)
    if copy is None:
        return "no_copy"
    board = build_system(t)
    script = CycleHoppingMaker(board, vertex_map=copy, name="embedded")
    result = StrategyVerifier(board, 1, budget).verify_maker(script)
    return {"ok": "win", "unknown": "unknown"}.get(result.status, "loss")


def mc_embedding_probability(
    n: int,
    p: float,
    trials: int,
    seed: int,
    jobs: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
) -> MCEstimate:
    """Share of sampled T(n, p) containing an order-preserving copy of Π(7)."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    print(f"{Fore.CYAN}[*] Sampling {trials} x T({n}, {p}) for Π(7) copies...{Style.RESET_ALL}")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    outcomes = _run_trials(_embedding_trial, [(n, p, s) for s in seeds], jobs)
    hits = outcomes.count("hit")
    low, high = proportion_interval(hits, trials, confidence)
    print(f"    > {hits}/{trials} contain a copy")
    return MCEstimate(
        n=n,
        p=p,
        trials=trials,
        successes=hits,
        estimate=hits / trials,
        ci_low=low,
        ci_high=high,
        master_seed=seed,
    )


def mc_maker_win(
    n: int,
    p: float,
    trials: int,
    seed: int,
    budget: int = DEFAULT_MC_BUDGET,
    jobs: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
) -> MCEstimate:
    """Share of decided trials where cycle hopping on a found copy verifies as a Maker win.

    Trials without a copy are counted in ``no_copy`` and budget-exhausted ones
    in ``unknowns``; neither enters the estimate's denominator.
    """
    _check_open_probability(p)
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if budget > DEFAULT_VERIFY_BUDGET:
        raise ValueError(f"per-trial budget {budget} exceeds {DEFAULT_VERIFY_BUDGET}")
    print(f"{Fore.CYAN}[*] Verifying Maker on {trials} x T({n}, {p})...{Style.RESET_ALL}")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    outcomes = _run_trials(_maker_trial, [(n, p, s, budget) for s in seeds], jobs)
    wins = outcomes.count("win")
    unknowns = outcomes.count("unknown")
    no_copy = outcomes.count("no_copy")
    decided = trials - unknowns - no_copy
    low, high = proportion_interval(wins, decided, confidence)
    print(f"    > {wins}/{decided} decided trials won ({no_copy} without a copy, {unknowns} unknown)")
    if unknowns:
        print(f"{Fore.YELLOW}[!] {unknowns} trials ran out of budget.{Style.RESET_ALL}")
    return MCEstimate(
        n=n,
        p=p,
        trials=trials,
        successes=wins,
        unknowns=unknowns,
        no_copy=no_copy,
        estimate=wins / decided if decided else 0.0,
        ci_low=low,
        ci_high=high,
        master_seed=seed,
    )
