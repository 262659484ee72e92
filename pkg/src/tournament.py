"""Tournaments: construction, flips, scores and directed-triangle counting."""
from __future__ import annotations

from functools import cached_property
from math import comb
from pathlib import Path
from typing import NamedTuple, Sequence

import networkx as nx
import numpy as np
from pydantic import BaseModel, model_validator

Triangle = tuple[int, int, int]


class DirectedEdge(NamedTuple):
    """Edge ``source -> target`` between two vertices of 1..n."""

    source: int
    target: int

    def __str__(self) -> str:
        return f"({self.source},{self.target})"


class ScoreVector(BaseModel):
    """Out-degrees and deviances of a tournament.

    For odd ``n`` the deviance is ``s_i - (n-1)/2``. For even ``n`` the
    half-integer deviance is stored doubled (``doubled=True``) so every
    entry stays an integer.
    """

    n: int
    scores: list[int]
    deviances: list[int]
    doubled: bool

    @model_validator(mode="after")
    def _check_sums(self) -> ScoreVector:
        if sum(self.scores) != comb(self.n, 2):
            raise ValueError(
                f"scores sum to {sum(self.scores)}, expected C({self.n},2) = {comb(self.n, 2)}"
            )
        if sum(self.deviances) != 0:
            raise ValueError(f"deviances sum to {sum(self.deviances)}, expected 0")
        return self


# ------------------------------------------------------------------
# Pair indexing
# ------------------------------------------------------------------
def pair_index(n: int, i: int, j: int) -> int:
    """Row-major index of the pair ``{i, j}`` (``i < j``) among the C(n,2) pairs."""
    if not 1 <= i < j <= n:
        raise ValueError(f"pair ({i},{j}) is not an ordered pair of 1..{n}")
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """1-based ``(I, J)`` arrays listing every pair ``i < j`` in row-major order."""
    rows, cols = np.triu_indices(n, k=1)
    return rows + 1, cols + 1


class Tournament:
    """
    The Board.

    Responsibility:
    1. Hold exactly one orientation per vertex pair as an upper-triangular
       boolean array in row-major pair order (i, j), i < j; True means i -> j.
    2. Answer edge, score and adjacency queries.
    3. Produce flipped or induced copies. Instances are never mutated.
    """

    def __init__(self, n: int, bits: Sequence[bool] | np.ndarray):
        if n < 1:
            raise ValueError(f"a tournament needs n >= 1 vertices, got {n}")
        arr = np.array(bits, dtype=bool).reshape(-1)
        if arr.shape != (comb(n, 2),):
            raise ValueError(
                f"expected {comb(n, 2)} orientation bits for n={n}, got {arr.size}"
            )
        arr.setflags(write=False)
        self.n = n
        self.bits = arr

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------
    @property
    def edge_count(self) -> int:
        return int(self.bits.size)

    @cached_property
    def _adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        rows, cols = np.triu_indices(self.n, k=1)
        adj[rows, cols] = self.bits
        adj[cols, rows] = ~self.bits
        adj.setflags(write=False)
        return adj

    def adjacency(self) -> np.ndarray:
        """Read-only ``n x n`` matrix; ``A[u-1, v-1]`` is True iff ``u -> v``."""
        return self._adjacency

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise ValueError(f"self-loop ({u},{u}) is not a tournament edge")
        if u < v:
            return bool(self.bits[pair_index(self.n, u, v)])
        return not bool(self.bits[pair_index(self.n, v, u)])

    def edges(self) -> list[DirectedEdge]:
        """Every edge, in row-major pair order (the element-id order)."""
        rows, cols = pair_arrays(self.n)
        return [
            DirectedEdge(int(i), int(j)) if bit else DirectedEdge(int(j), int(i))
            for i, j, bit in zip(rows, cols, self.bits)
        ]

    def scores(self) -> np.ndarray:
        return self._adjacency.sum(axis=1).astype(np.int64)

    def induced(self, vertices: Sequence[int]) -> Tournament:
        """Sub-tournament on an increasing vertex tuple, relabelled ``1..k``."""
        vs = list(vertices)
        if any(b <= a for a, b in zip(vs, vs[1:])):
            raise ValueError(f"vertices must be strictly increasing, got {vs}")
        for v in vs:
            self._check_vertex(v)
        idx = np.array(vs, dtype=np.int64) - 1
        sub = self._adjacency[np.ix_(idx, idx)]
        rows, cols = np.triu_indices(len(vs), k=1)
        return Tournament(len(vs), sub[rows, cols])

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from(self.edges())
        return graph

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside 1..{self.n}")

    # ------------------------------------------------------------------
    # Text format
    # ------------------------------------------------------------------
    def to_text(self) -> str:
        """Line 1 ``n``; line 2 the pair bits, ``1`` meaning ``i -> j``."""
        payload = "".join("1" if bit else "0" for bit in self.bits)
        return f"{self.n}\n{payload}\n"

    @classmethod
    def from_text(cls, text: str) -> Tournament:
        lines = [line.strip() for line in text.strip().splitlines()]
        if not lines or not lines[0].isdigit():
            raise ValueError("tournament file must start with the vertex count n")
        n = int(lines[0])
        payload = lines[1] if len(lines) > 1 else ""
        if set(payload) - {"0", "1"}:
            raise ValueError("orientation line may only contain '0' and '1'")
        return cls(n, [ch == "1" for ch in payload])

    # ------------------------------------------------------------------
    # Value semantics
    # ------------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tournament):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"Tournament(n={self.n}, triangles={count_triangles_moon(self)})"


# ------------------------------------------------------------------
# Constructors
# ------------------------------------------------------------------
def build_parity(n: int) -> Tournament:
    """Π(n): for i < j the edge is i -> j iff i + j is odd."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rows, cols = pair_arrays(n)
    return Tournament(n, (rows + cols) % 2 == 1)


def build_transitive(n: int) -> Tournament:
    """Λ(n): i -> j for every i < j, so vertex 1 beats everyone."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return Tournament(n, np.ones(comb(n, 2), dtype=bool))


def sample_random(
    n: int,
    p: float,
    seed: int | np.random.SeedSequence | np.random.Generator | None,
) -> Tournament:
    """T(n, p): each pair i < j independently oriented i -> j with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p must lie in [0, 1], got {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return Tournament(n, rng.random(comb(n, 2)) < p)


def flip_edge(t: Tournament, e: DirectedEdge | tuple[int, int]) -> Tournament:
    """Copy of ``t`` with edge ``e`` reversed."""
    e = DirectedEdge(*e)
    if not t.has_edge(e.source, e.target):
        raise ValueError(f"edge has opposite orientation: {e} is not in the tournament")
    bits = t.bits.copy()
    lo, hi = sorted(e)
    bits[pair_index(t.n, lo, hi)] ^= True
    return Tournament(t.n, bits)


def load_board(scheme: str) -> Tournament:
    """Resolve ``parity:n``, ``transitive:n``, ``random:n:p:seed`` or ``file:path``."""
    kind, _, rest = scheme.partition(":")
    try:
        if kind == "parity":
            return build_parity(int(rest))
        if kind == "transitive":
            return build_transitive(int(rest))
        if kind == "random":
            n, p, seed = rest.split(":")
            return sample_random(int(n), float(p), int(seed))
    except ValueError as exc:
        raise ValueError(f"bad board scheme '{scheme}': {exc}") from exc
    if kind == "file":
        return Tournament.from_text(Path(rest).read_text())
    raise ValueError(
        f"unknown board scheme '{scheme}' (expected parity:n, transitive:n, "
        "random:n:p:seed or file:path)"
    )


# ------------------------------------------------------------------
# Scores and triangles
# ------------------------------------------------------------------
def score_vector(t: Tournament) -> ScoreVector:
    scores = [int(s) for s in t.scores()]
    if t.n % 2 == 1:
        half = (t.n - 1) // 2
        return ScoreVector(n=t.n, scores=scores, deviances=[s - half for s in scores], doubled=False)
    return ScoreVector(
        n=t.n, scores=scores, deviances=[2 * s - (t.n - 1) for s in scores], doubled=True
    )


def is_directed_triangle(t: Tournament, a: int, b: int, c: int) -> bool:
    if len({a, b, c}) != 3:
        raise ValueError(f"triangle vertices must be distinct, got ({a},{b},{c})")
    return t.has_edge(a, b) and t.has_edge(b, c) and t.has_edge(c, a)


def enumerate_triangles(t: Tournament) -> list[Triangle]:
    """All directed triangles ``(a, b, c)`` with ``a`` minimal, lexicographic."""
    adj = t.adjacency()
    found: list[Triangle] = []
    for a in range(t.n - 2):
        beats = adj[a, a + 1:]
        beaten_by = adj[a + 1:, a]
        if not beats.any() or not beaten_by.any():
            continue
        closing = beats[:, None] & adj[a + 1:, a + 1:] & beaten_by[None, :]
        for b, c in np.argwhere(closing):
            found.append((a + 1, a + 2 + int(b), a + 2 + int(c)))
    return found


def count_triangles_moon(t: Tournament) -> int:
    """C(n,3) - sum C(s_i, 2)."""
    return comb(t.n, 3) - sum(comb(int(s), 2) for s in t.scores())


def count_triangles_networkx(t: Tournament) -> int:
    """Independent 3-cycle count straight from the digraph."""
    cycles = nx.simple_cycles(t.to_networkx(), length_bound=3)
    return sum(1 for cycle in cycles if len(cycle) == 3)


def w_closed_form(n: int) -> int:
    """Triangle count of Π(n); also the regular-tournament maximum."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n % 2 == 1:
        return (n**3 - n) // 24
    return (n**3 - 4 * n) // 24


def w_ceiling_sum(n: int) -> int:
    """sum_{i=1}^{n-2} ceil(i/2) * ceil((n-i-1)/2)."""
    return sum(-(-i // 2) * -(-(n - i - 1) // 2) for i in range(1, n - 1))


def moon_upper_bound(n: int) -> int:
    """Most directed triangles any n-vertex tournament can hold; tight iff (near-)regular."""
    return w_closed_form(n)
