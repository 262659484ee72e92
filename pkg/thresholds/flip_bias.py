"""Breaker's pre-game flipping strategy and the flip-bias thresholds.

Before play Breaker reverses edges of Π(n) (n odd), phase by phase: in
phase ``i`` she flips every edge ``j -> i`` with ``j > i`` and ``j ≡ i (mod 2)``,
largest ``j`` first. Flipping ``j -> i`` lowers the triangle count by
``1 + δ_i - δ_j`` where δ are the current deviances. Each phase reduces the
count by exactly 1, 2, ..., ⌊(n-i)/2⌋ and the full plan ends on Λ(n).

The incremental ledger and the upper threshold replay the deviance
arithmetic flip by flip; the lower threshold uses the closed-form phase deltas
so it scales to n in the thousands.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

import numpy as np

from src.tournament import (
    build_parity,
    enumerate_triangles,
    flip_edge,
    score_vector,
    w_closed_form,
)
from thresholds.outputs import BlockDecomposition, FlipLedgerRow, FlipPlan, KappaRow

# Breaker wins once at most this many winning sets remain.
BREAKER_WIN_REMAINING = 3
REVERSE_PREFIX_LENGTH = 20


def _require_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ValueError(
            f"flip-bias analysis assumes odd n >= 3 (a regular starting tournament), got n={n}"
        )


# ------------------------------------------------------------------
# Plans and the ledger
# ------------------------------------------------------------------
@lru_cache(maxsize=64)
def build_flip_plan(n: int) -> FlipPlan:
    """Replay the phase strategy on Π(n), tracking deviances incrementally."""
    _require_odd(n)
    deviance = [0] * (n + 1)
    flips: list[tuple[int, int]] = []
    deltas: list[int] = []
    phases: list[int] = []
    for i in range(1, n - 1):
        sources = list(range(n - (n - i) % 2, i, -2))
        for j in sources:
            deltas.append(1 + deviance[i] - deviance[j])
            flips.append((j, i))
            deviance[i] += 1
            deviance[j] -= 1
        phases.append(len(sources))
    return FlipPlan(n=n, flips=flips, deltas=deltas, phases=phases)


def phase_deltas(n: int) -> np.ndarray:
    """Closed-form per-flip reductions: phase i contributes 1, 2, ..., ⌊(n-i)/2⌋."""
    _require_odd(n)
    return np.concatenate(
        [np.arange(1, (n - i) // 2 + 1, dtype=np.int64) for i in range(1, n - 1)]
    )


def remaining_curve(n: int, replay: bool = False) -> np.ndarray:
    """``w(n) - F(k)`` for k = 0..total.

    The deltas come from the closed form, or with ``replay`` from the
    deviance arithmetic of :func:`build_flip_plan`.
    """
    deltas = build_flip_plan(n).deltas if replay else phase_deltas(n)
    reductions = np.concatenate([[0], np.cumsum(deltas, dtype=np.int64)])
    return w_closed_form(n) - reductions


def triangles_after(plan: FlipPlan, k: int) -> int:
    """Directed triangles left after the first ``k`` flips of ``plan``."""
    if not 0 <= k <= plan.total:
        raise ValueError(f"flip count k={k} outside 0..{plan.total}")
    return w_closed_form(plan.n) - sum(plan.deltas[:k])


def flip_ledger(plan: FlipPlan, recount: bool = True) -> list[FlipLedgerRow]:
    """Apply ``plan`` to Π(n) one flip at a time.

    Row 0 is the untouched board. With ``recount`` the remaining triangles
    are also enumerated from scratch on every intermediate tournament.
    """
    t = build_parity(plan.n)
    remaining = w_closed_form(plan.n)

    def row(k: int, phase: int, edge: str, delta: int) -> FlipLedgerRow:
        return FlipLedgerRow(
            flip=k,
            phase=phase,
            edge=edge,
            delta=delta,
            remaining=remaining,
            remaining_enumerated=len(enumerate_triangles(t)) if recount else None,
            deviances=score_vector(t).deviances,
        )

    rows = [row(0, 0, "-", 0)]
    steps = zip(plan.flips, plan.deltas, plan.phase_of())
    for k, ((j, i), delta, phase) in enumerate(steps, start=1):
        t = flip_edge(t, (j, i))
        remaining -= delta
        rows.append(row(k, phase, f"{j}->{i}", delta))
    return rows


# ------------------------------------------------------------------
# Thresholds
# ------------------------------------------------------------------
def total_flips(n: int) -> int:
    _require_odd(n)
    return (n - 1) ** 2 // 4


def kappa_upper_closed_form(n: int) -> int:
    """(n-1)^2/4 - 3, as the closed form states it."""
    return total_flips(n) - 3


def kappa_upper_exact(n: int) -> int:
    """Fewest flips along the replayed plan leaving at most three winning sets."""
    remaining = remaining_curve(n, replay=True)
    return int(np.argmax(remaining <= BREAKER_WIN_REMAINING))


def kappa_lower_exact(n: int) -> int:
    """Most flips along the plan that still leave more winning sets than edges.

    0 when the untouched board already fails the criterion (every odd n <= 11).
    """
    remaining = remaining_curve(n)
    above = int(np.count_nonzero(remaining > math.comb(n, 2)))
    return max(above - 1, 0)


def kappa_lower_asymptotic(n: int) -> float:
    """n^2/4 - (3/2)^(2/3) n^(4/3); the O(n) term is dropped."""
    _require_odd(n)
    return n * n / 4 - 1.5 ** (2 / 3) * n ** (4 / 3)


# ------------------------------------------------------------------
# Block decomposition of the reverse sequence
# ------------------------------------------------------------------
def block_sum(z: int) -> int:
    """S_Z = Z(Z+1)(Z+2)/3."""
    return z * (z + 1) * (z + 2) // 3


def block_length(z: int) -> int:
    """L_Z = Z(Z+1)."""
    return z * (z + 1)


def walk_blocks(z_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative sums and lengths of blocks 1..z_max built entry by entry.

    Block k is (k, k-1, ..., 1) written twice. Index 0 holds the empty prefix.
    """
    sums = np.zeros(z_max + 1, dtype=np.int64)
    lengths = np.zeros(z_max + 1, dtype=np.int64)
    for k in range(1, z_max + 1):
        block = np.tile(np.arange(k, 0, -1, dtype=np.int64), 2)
        sums[k] = sums[k - 1] + block.sum()
        lengths[k] = lengths[k - 1] + block.size
    return sums, lengths


def block_decomposition(n: int) -> BlockDecomposition:
    """Locate N = C(n,2) inside the block walk of the reverse delta sequence."""
    _require_odd(n)
    N = math.comb(n, 2)
    K = 0
    while block_sum(K + 1) <= N:
        K += 1
    cumulative, r_next = block_sum(K), 0
    block = [*range(K + 1, 0, -1)] * 2
    while cumulative <= N:
        cumulative += block[r_next]
        r_next += 1
    reverse = phase_deltas(n)[::-1]
    return BlockDecomposition(
        n=n,
        N=N,
        K=K,
        r_next=r_next,
        x=block_length(K) + r_next,
        S=[block_sum(z) for z in range(K + 2)],
        L=[block_length(z) for z in range(K + 2)],
        reverse_prefix=[int(d) for d in reverse[:REVERSE_PREFIX_LENGTH]],
    )


# ------------------------------------------------------------------
# Sweeps
# ------------------------------------------------------------------
def kappa_row(n: int) -> KappaRow:
    blocks = block_decomposition(n)
    return KappaRow(
        n=n,
        total_flips=total_flips(n),
        kappa_upper_closed_form=kappa_upper_closed_form(n),
        kappa_upper_exact=kappa_upper_exact(n),
        kappa_lower_exact=kappa_lower_exact(n),
        kappa_lower_asymptotic=kappa_lower_asymptotic(n),
        x=blocks.x,
        K=blocks.K,
    )


def kappa_sweep(ns: Iterable[int]) -> list[KappaRow]:
    return [kappa_row(n) for n in ns]


def fit_lower_bound_constant(ns: Iterable[int]) -> float:
    """Smallest c with |κ_low exact - asymptotic| <= c·n over ``ns``."""
    gaps = [abs(kappa_lower_exact(n) - kappa_lower_asymptotic(n)) / n for n in ns]
    if not gaps:
        raise ValueError("need at least one n to fit the lower-bound constant")
    return max(gaps)
