"""Winning-set hypergraph, game state, threats, cuts and pairings."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from src.tournament import DirectedEdge, Tournament, Triangle, enumerate_triangles, pair_index


class Player(str, Enum):
    MAKER = "maker"
    BREAKER = "breaker"

    @property
    def opponent(self) -> Player:
        return Player.BREAKER if self is Player.MAKER else Player.MAKER


class IllegalMoveError(ValueError):
    """A move that claims a missing, already claimed or out-of-turn element."""


class PairingError(ValueError):
    """A pairing operation that cannot be carried out on the given sets."""


class Threat(NamedTuple):
    set_id: int
    missing: int


def iter_bits(mask: int) -> Iterator[int]:
    """Set bit positions of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(ids: Iterable[int]) -> int:
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


# ------------------------------------------------------------------
# Winning sets
# ------------------------------------------------------------------
class WinningSetSystem:
    """
    The Hypergraph.

    Responsibility:
    1. Give every board edge a stable integer id (its row-major pair index).
    2. Hold one 3-element set per directed triangle, each with a stable set id
       (its position in lexicographic triangle order).
    3. Track which sets survive Breaker's cuts, and which elements still lie
       in a surviving set. Instances are immutable; ``cut`` returns a new one.
    """

    def __init__(
        self,
        tournament: Tournament,
        triangles: list[Triangle],
        surviving: int | None = None,
        elements: int | None = None,
    ):
        self.tournament = tournament
        self.triangles = triangles
        self.edges = tournament.edges()
        self.n_elements = len(self.edges)
        self.set_masks: list[int] = []
        self.element_sets: list[int] = [0] * self.n_elements
        for sid, (a, b, c) in enumerate(triangles):
            mask = 0
            for u, v in ((a, b), (b, c), (c, a)):
                eid = pair_index(tournament.n, min(u, v), max(u, v))
                mask |= 1 << eid
                self.element_sets[eid] |= 1 << sid
            self.set_masks.append(mask)
        self.all_sets = (1 << len(triangles)) - 1
        self.all_elements = (1 << self.n_elements) - 1
        self.surviving = self.all_sets if surviving is None else surviving
        self.element_mask = self.all_elements if elements is None else elements
        self._set_index = {tri: sid for sid, tri in enumerate(triangles)}

    # ------------------------------------------------------------------
    # Element and set lookup
    # ------------------------------------------------------------------
    def element_id(self, edge: DirectedEdge | tuple[int, int]) -> int:
        u, v = edge
        if not self.tournament.has_edge(u, v):
            raise ValueError(f"edge has opposite orientation: ({u},{v}) is not on the board")
        return pair_index(self.tournament.n, min(u, v), max(u, v))

    def edge(self, element: int) -> DirectedEdge:
        return self.edges[element]

    def set_id_of(self, a: int, b: int, c: int) -> int:
        """Set id of the triangle through ``a, b, c`` given in cyclic order."""
        k = (a, b, c).index(min(a, b, c))
        key = ((a, b, c)[k], (a, b, c)[(k + 1) % 3], (a, b, c)[(k + 2) % 3])
        if key not in self._set_index:
            raise ValueError(f"({a},{b},{c}) is not a directed triangle of the board")
        return self._set_index[key]

    def set_edges(self, set_id: int) -> list[DirectedEdge]:
        return [self.edges[e] for e in iter_bits(self.set_masks[set_id])]

    def union(self, sets: int) -> int:
        """Mask of every element lying in one of ``sets``."""
        mask = 0
        for sid in iter_bits(sets):
            mask |= self.set_masks[sid]
        return mask

    def sets_hit(self, elements: int) -> int:
        """Mask of every set containing one of ``elements``."""
        mask = 0
        for eid in iter_bits(elements):
            mask |= self.element_sets[eid]
        return mask

    @property
    def elements(self) -> list[DirectedEdge]:
        return [self.edges[e] for e in iter_bits(self.element_mask)]

    @property
    def sets(self) -> list[frozenset[DirectedEdge]]:
        return [frozenset(self.set_edges(sid)) for sid in iter_bits(self.surviving)]

    @property
    def is_pristine(self) -> bool:
        return self.surviving == self.all_sets

    def degree(self, element: int) -> int:
        return (self.element_sets[element] & self.surviving).bit_count()

    def max_pair_degree(self) -> int:
        """Δ₂: the largest number of surviving sets sharing a pair of elements."""
        counts: dict[tuple[int, int], int] = {}
        for sid in iter_bits(self.surviving):
            for pair in combinations(iter_bits(self.set_masks[sid]), 2):
                counts[pair] = counts.get(pair, 0) + 1
        return max(counts.values(), default=0)

    # ------------------------------------------------------------------
    # Cuts
    # ------------------------------------------------------------------
    def cut(self, element: int | DirectedEdge | tuple[int, int]) -> WinningSetSystem:
        """Drop every set containing ``element``, then every orphaned element."""
        eid = element if isinstance(element, int) else self.element_id(element)
        if not 0 <= eid < self.n_elements:
            raise ValueError(f"unknown element {element} for this board")
        surviving = self.surviving & ~self.element_sets[eid]
        return self._derive(surviving, self.union(surviving))

    def restricted(self, surviving: int) -> WinningSetSystem:
        """Same board with only ``surviving`` sets kept."""
        return self._derive(surviving & self.all_sets, self.union(surviving))

    def _derive(self, surviving: int, elements: int) -> WinningSetSystem:
        clone = object.__new__(WinningSetSystem)
        clone.__dict__.update(self.__dict__)
        clone.surviving = surviving
        clone.element_mask = elements
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WinningSetSystem):
            return NotImplemented
        return (
            self.tournament == other.tournament
            and self.surviving == other.surviving
            and self.element_mask == other.element_mask
        )

    def __hash__(self) -> int:
        return hash((self.tournament, self.surviving, self.element_mask))

    def __repr__(self) -> str:
        return (
            f"WinningSetSystem(n={self.tournament.n}, sets={self.surviving.bit_count()}, "
            f"elements={self.element_mask.bit_count()})"
        )


def build_system(t: Tournament) -> WinningSetSystem:
    """One set per directed triangle; the full edge set is kept as elements."""
    return WinningSetSystem(t, enumerate_triangles(t))


# ------------------------------------------------------------------
# Game state
# ------------------------------------------------------------------
@dataclass(frozen=True, slots=True)
class GameState:
    """Partition of the board into Maker / Breaker / unclaimed elements.

    ``pending`` is the number of elements the side to move still takes in
    the current turn; it defaults to that side's bias.
    """

    board: WinningSetSystem
    maker: int = 0
    breaker: int = 0
    breaker_bias: int = 1
    maker_bias: int = 1
    to_move: Player = Player.MAKER
    pending: int = field(default=0)

    def __post_init__(self) -> None:
        if self.maker_bias < 1 or self.breaker_bias < 1:
            raise ValueError(f"biases must be positive, got ({self.maker_bias}:{self.breaker_bias})")
        if self.maker & self.breaker:
            raise ValueError("an element cannot belong to both Maker and Breaker")
        if (self.maker | self.breaker) & ~self.board.all_elements:
            raise ValueError("claimed elements must be board elements")
        bias = self.bias_of(self.to_move)
        if self.pending == 0:
            object.__setattr__(self, "pending", bias)
        if not 1 <= self.pending <= bias:
            raise ValueError(f"pending sub-moves {self.pending} outside 1..{bias}")
        if self.unclaimed and not self._counts_consistent():
            raise ValueError(
                f"{self.maker.bit_count()} Maker / {self.breaker.bit_count()} Breaker elements "
                f"do not fit a ({self.maker_bias}:{self.breaker_bias}) game with "
                f"{self.to_move.value} to move"
            )

    def bias_of(self, player: Player) -> int:
        return self.maker_bias if player is Player.MAKER else self.breaker_bias

    @property
    def unclaimed(self) -> int:
        return self.board.all_elements & ~self.maker & ~self.breaker

    def _counts_consistent(self) -> bool:
        a, b = self.maker_bias, self.breaker_bias
        made, broke = self.maker.bit_count(), self.breaker.bit_count()
        if self.to_move is Player.MAKER:
            taken = a - self.pending
            turns = broke // b
            return broke == b * turns and made == a * turns + taken
        taken = b - self.pending
        turns = -(-made // a)
        return made == a * turns and broke == b * (turns - 1) + taken

    def play(self, element: int) -> GameState:
        """Claim (Maker) or delete (Breaker) one element."""
        if not 0 <= element < self.board.n_elements:
            raise IllegalMoveError(f"element {element} is not on the board")
        bit = 1 << element
        if (self.maker | self.breaker) & bit:
            raise IllegalMoveError(f"element {element} {self.board.edge(element)} is already claimed")
        maker, breaker = self.maker, self.breaker
        if self.to_move is Player.MAKER:
            maker |= bit
        else:
            breaker |= bit
        to_move, pending = self.to_move, self.pending - 1
        if pending == 0:
            to_move = self.to_move.opponent
            pending = self.bias_of(to_move)
        state = object.__new__(GameState)
        for name, value in (
            ("board", self.board),
            ("maker", maker),
            ("breaker", breaker),
            ("breaker_bias", self.breaker_bias),
            ("maker_bias", self.maker_bias),
            ("to_move", to_move),
            ("pending", pending),
        ):
            object.__setattr__(state, name, value)
        return state

    def play_many(self, elements: Iterable[int]) -> GameState:
        state = self
        for e in elements:
            state = state.play(e)
        return state


def threats(s: GameState) -> list[Threat]:
    """Surviving sets with two Maker elements, no Breaker element; by set id."""
    board = s.board
    found: list[Threat] = []
    for sid in iter_bits(board.sets_hit(s.maker) & board.surviving):
        mask = board.set_masks[sid]
        if mask & s.breaker or (mask & s.maker).bit_count() != 2:
            continue
        found.append(Threat(sid, (mask & ~s.maker).bit_length() - 1))
    return found


def winner_if_terminal(s: GameState) -> Player | None:
    board = s.board
    for sid in iter_bits(board.sets_hit(s.maker) & board.surviving):
        if board.set_masks[sid] & ~s.maker == 0:
            return Player.MAKER
    if board.surviving & ~board.sets_hit(s.breaker) == 0:
        return Player.BREAKER
    if s.unclaimed == 0:
        return Player.BREAKER
    return None


# ------------------------------------------------------------------
# Pairings
# ------------------------------------------------------------------
@dataclass(frozen=True)
class Pairing:
    """Disjoint element pairs; ``free`` is a spare element left unpaired.

    ``cascade`` records the alternating path of the switch cascade that
    produced this pairing, if any.
    """

    pairs: tuple[tuple[int, int], ...]
    free: int | None = None
    cascade: tuple[int, ...] = ()
    _partner: dict[int, int] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        canonical = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", canonical)
        for x, y in canonical:
            if x == y or x in self._partner or y in self._partner:
                raise PairingError(f"pairs are not pairwise disjoint at ({x},{y})")
            self._partner[x] = y
            self._partner[y] = x

    @classmethod
    def from_edges(
        cls,
        board: WinningSetSystem,
        pairs: Iterable[tuple[tuple[int, int], tuple[int, int]]],
        free: tuple[int, int] | None = None,
    ) -> Pairing:
        return cls(
            pairs=tuple((board.element_id(x), board.element_id(y)) for x, y in pairs),
            free=None if free is None else board.element_id(free),
        )

    def partner(self, element: int) -> int | None:
        return self._partner.get(element)

    @property
    def cascade_length(self) -> int:
        return len(self.cascade) // 2


def validate_pairing(
    board: WinningSetSystem, pairing: Pairing, exclude: Iterable[int] | int = 0
) -> tuple[bool, str]:
    """Check the pairing blocks every surviving set and avoids played elements."""
    excluded = exclude if isinstance(exclude, int) else to_mask(exclude)
    seen = 0
    for x, y in pairing.pairs:
        bits = (1 << x) | (1 << y)
        if seen & bits:
            return False, f"pair {board.edge(x)}-{board.edge(y)} overlaps another pair"
        seen |= bits
        if excluded & bits:
            return False, f"pair {board.edge(x)}-{board.edge(y)} touches an already played element"
    pair_masks = [(1 << x) | (1 << y) for x, y in pairing.pairs]
    for sid in iter_bits(board.surviving):
        mask = board.set_masks[sid]
        if not any(mask & pm == pm for pm in pair_masks):
            return False, f"set {sid} {board.triangles[sid]} is not blocked by any pair"
    return True, "ok"


def compute_switch_cascade(
    board: WinningSetSystem, pairing: Pairing, m: int, free: int
) -> Pairing:
    """Re-pair along the alternating path from ``m`` to the spare ``free``.

    The path is p1=m, p2=partner(p1), p3=third element of the set blocked by
    {p1, p2}, p4=partner(p3), ... until p_k == free. Pairs {p1,p2}, {p3,p4}, ...
    are replaced by {p2,p3}, {p4,p5}, ..., which leaves ``m`` unpaired.
    """
    if pairing.partner(free) is not None:
        raise PairingError(f"spare element {board.edge(free)} is already paired")
    if pairing.partner(m) is None:
        return pairing
    path = [m]
    visited = {m}
    while True:
        x = path[-1]
        y = pairing.partner(x)
        pair_mask = (1 << x) | (1 << y)
        holders = [
            sid
            for sid in iter_bits(board.element_sets[x] & board.element_sets[y] & board.surviving)
            if board.set_masks[sid] & pair_mask == pair_mask
        ]
        if not holders:
            raise PairingError(f"pair {board.edge(x)}-{board.edge(y)} blocks no surviving set")
        z = (board.set_masks[holders[0]] & ~pair_mask).bit_length() - 1
        path += [y, z]
        if z == free:
            break
        if z in visited or y in visited or pairing.partner(z) is None:
            raise PairingError(
                f"no alternating path from {board.edge(m)} to {board.edge(free)} "
                f"(stuck at {board.edge(z)})"
            )
        visited.update((y, z))
    dropped = {tuple(sorted((path[i], path[i + 1]))) for i in range(0, len(path) - 1, 2)}
    added = [(path[i], path[i + 1]) for i in range(1, len(path) - 1, 2)]
    kept = [p for p in pairing.pairs if p not in dropped]
    return Pairing(pairs=tuple(kept + added), free=None, cascade=tuple(path))
