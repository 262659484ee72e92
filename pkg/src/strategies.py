"""Scripted Maker and Breaker strategies for parity boards."""
from __future__ import annotations

import copy
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from src.hypergraph import (
    GameState,
    Pairing,
    PairingError,
    Player,
    WinningSetSystem,
    build_system,
    compute_switch_cascade,
    iter_bits,
    threats,
    to_mask,
    validate_pairing,
    winner_if_terminal,
)
from src.tournament import build_parity
from src.transcript import Line, Transcript

Edge = tuple[int, int]


class StrategyError(RuntimeError):
    """A script cannot keep its contract (cycle cut, pairing broken, no legal move)."""


def _lowest(mask: int) -> int:
    if not mask:
        raise StrategyError("no unclaimed element left to take")
    return (mask & -mask).bit_length() - 1


def _require_parity(board: WinningSetSystem, sizes: Iterable[int], script: str) -> int:
    t = board.tournament
    if t.n not in set(sizes) or t != build_parity(t.n):
        raise ValueError(f"script '{script}' cannot play on {board!r}")
    return t.n


# ------------------------------------------------------------------
# Base class
# ------------------------------------------------------------------
class StrategyScript(ABC):
    """Deterministic move chooser for one side of one game.

    Scripts read the position they are handed and keep whatever they decided
    earlier (pairing, cycle) as plain immutable attributes, so ``clone`` is a
    shallow copy and ``snapshot`` fully describes future behaviour.
    """

    role: Player
    name: str = "script"

    def __init__(self, board: WinningSetSystem):
        self.board = board

    @abstractmethod
    def choose(self, state: GameState) -> int:
        """Element id to claim (Maker) or delete (Breaker) as the next sub-move.

        Parameters
        ----------
        state:
            Position with this script's side to move.

        Returns
        -------
        int
            An unclaimed element id.
        """

    def snapshot(self) -> Hashable:
        return ()

    def clone(self) -> StrategyScript:
        return copy.copy(self)

    @property
    def support(self) -> int | None:
        """Elements the script plays in and reacts to; None means the whole board."""
        return None

    def _check_turn(self, state: GameState) -> None:
        if state.to_move is not self.role:
            raise StrategyError(
                f"script '{self.name}' plays {self.role.value} but {state.to_move.value} is to move"
            )


# ------------------------------------------------------------------
# Pairing strategies
# ------------------------------------------------------------------
class PairingBreaker(StrategyScript):
    """Delete the partner of Maker's newest element, else the lowest unclaimed element."""

    role = Player.BREAKER

    def __init__(self, board: WinningSetSystem, pairing: Pairing | None, name: str = "pairing"):
        super().__init__(board)
        self.name = name
        self.pairing = pairing
        self._seen = 0
        if pairing is not None:
            ok, diagnostic = validate_pairing(board, pairing)
            if not ok:
                raise PairingError(f"pairing does not block {board!r}: {diagnostic}")

    def choose(self, state: GameState) -> int:
        self._check_turn(state)
        fresh = state.maker & ~self._seen
        self._seen = state.maker
        if self.pairing is not None:
            for m in iter_bits(fresh):
                partner = self.pairing.partner(m)
                if partner is not None and state.unclaimed >> partner & 1:
                    return partner
        return _lowest(state.unclaimed)

    def snapshot(self) -> Hashable:
        return self.pairing.pairs if self.pairing is not None else ()


SMALL_PAIRINGS: dict[int, list[tuple[Edge, Edge]]] = {
    3: [((1, 2), (2, 3))],
    4: [((1, 2), (3, 1)), ((3, 4), (4, 2))],
    5: [
        ((1, 2), (3, 1)),
        ((2, 3), (4, 2)),
        ((3, 4), (5, 3)),
        ((4, 5), (1, 4)),
        ((5, 1), (2, 5)),
    ],
}


def breaker_pairing_small(board: WinningSetSystem) -> PairingBreaker:
    """Fixed pairing strategy for Π(3), Π(4) and Π(5)."""
    n = _require_parity(board, SMALL_PAIRINGS, "pairing")
    return PairingBreaker(board, Pairing.from_edges(board, SMALL_PAIRINGS[n]), name="pairing")


# Π(6): one pair per surviving triangle after Breaker's opening cut.
PI6_DEFAULT_PAIRS: list[tuple[Edge, Edge]] = [
    ((1, 2), (3, 1)),  # 123
    ((4, 2), (3, 4)),  # 234
    ((5, 3), (4, 5)),  # 345
    ((6, 4), (5, 6)),  # 456
    ((3, 6), (6, 2)),  # 236
    ((5, 1), (1, 4)),  # 145
]
PI6_STATIC_PAIRS: list[tuple[Edge, Edge]] = [
    ((2, 3), (4, 2)),
    ((3, 4), (5, 3)),
    ((6, 4), (5, 6)),
    ((1, 4), (4, 5)),
]
PI6_SPARE: Edge = (2, 3)


class Pi6Breaker(PairingBreaker):
    """
    The Π(6) Breaker.

    Responsibility:
    1. Maker opens anywhere but (2,5): delete (2,5), adopt the default
       pairing and switch-cascade it away from Maker's element.
    2. Maker opens on (2,5): delete (6,2). If Maker then takes (5,1), delete
       (1,2) and adopt the static pairing; otherwise delete (5,1) and cascade
       the default pairing of the four remaining triangles.
    3. From then on answer by the pairing.
    """

    def __init__(self, board: WinningSetSystem):
        _require_parity(board, (6,), "pi6")
        super().__init__(board, None, name="pi6")
        self.phase = "opening"
        self.cascade_length = 0

    def _e(self, edge: Edge) -> int:
        return self.board.element_id(edge)

    def choose(self, state: GameState) -> int:
        if self.phase == "pairing":
            return super().choose(state)
        self._check_turn(state)
        fresh = state.maker & ~self._seen
        self._seen = state.maker
        if not fresh:
            return _lowest(state.unclaimed)
        m = _lowest(fresh)
        if self.phase == "opening":
            if m == self._e((2, 5)):
                self.phase = "answered (2,5)"
                return self._e((6, 2))
            self._adopt(PI6_DEFAULT_PAIRS, [(2, 5)], m, state)
            return self._e((2, 5))
        if m == self._e((5, 1)):
            self._adopt(PI6_STATIC_PAIRS, [(6, 2), (1, 2)], None, state)
            return self._e((1, 2))
        self._adopt(PI6_DEFAULT_PAIRS[:4], [(6, 2), (5, 1)], m, state)
        return self._e((5, 1))

    def _adopt(
        self,
        pairs: list[tuple[Edge, Edge]],
        cuts: list[Edge],
        m: int | None,
        state: GameState,
    ) -> None:
        remaining = self.board
        for edge in cuts:
            remaining = remaining.cut(edge)
        pairing = Pairing.from_edges(self.board, pairs)
        if m is not None:
            pairing = compute_switch_cascade(remaining, pairing, m, self._e(PI6_SPARE))
        played = state.maker | state.breaker | to_mask(self._e(e) for e in cuts)
        ok, diagnostic = validate_pairing(remaining, pairing, exclude=played)
        if not ok:
            raise StrategyError(f"Π(6) pairing broken: {diagnostic}")
        self.pairing = pairing
        self.cascade_length = pairing.cascade_length
        self.phase = "pairing"

    def snapshot(self) -> Hashable:
        return self.phase, super().snapshot()


def breaker_pi6(board: WinningSetSystem) -> Pi6Breaker:
    return Pi6Breaker(board)


# ------------------------------------------------------------------
# Cycle catalog of Π(7)
# ------------------------------------------------------------------
OUTER_CYCLE: tuple[Edge, ...] = (
    (1, 2), (3, 1), (2, 3), (4, 2), (3, 4), (5, 3), (4, 5),
    (6, 4), (5, 6), (7, 5), (6, 7), (1, 6), (7, 1), (2, 7), (1, 2),
)
BRIDGES: dict[str, tuple[Edge, ...]] = {
    "B1": ((1, 2), (5, 1), (2, 5), (6, 2), (5, 6)),
    "B2": ((2, 3), (6, 2), (3, 6), (7, 3), (6, 7)),
    "B3": ((3, 4), (7, 3), (4, 7), (1, 4), (7, 1)),
    "B4": ((4, 5), (5, 1), (1, 4), (4, 7), (7, 1)),
}
DERIVED_CYCLES: dict[str, tuple[Edge, ...]] = {
    "C'": (
        (1, 2), (3, 1), (2, 3), (6, 2), (3, 6), (7, 3),
        (6, 7), (1, 6), (7, 1), (2, 7), (1, 2),
    ),
    "C''": (
        (1, 2), (3, 1), (2, 3), (4, 2), (3, 4), (5, 3), (4, 5),
        (6, 4), (5, 6), (6, 2), (2, 5), (5, 1), (1, 2),
    ),
    "C'''": (
        (1, 2), (2, 7), (7, 1), (1, 6), (6, 7), (7, 5),
        (5, 6), (6, 2), (2, 5), (5, 1), (1, 2),
    ),
}
LEFT: frozenset[Edge] = frozenset({(2, 7), (7, 1), (1, 6), (6, 7), (7, 5)})
RIGHT: frozenset[Edge] = frozenset({(3, 1), (2, 3), (4, 2), (3, 4), (5, 3), (4, 5), (6, 4)})
FIRST_MOVE: Edge = (1, 2)


@lru_cache(maxsize=1)
def _pi7_system() -> WinningSetSystem:
    return build_system(build_parity(7))


@dataclass(frozen=True)
class CycleCatalog:
    """Hypergraph cycles of Π(7) through (1,2) and the bridges that link them.

    A cycle ``v0, v1, ..., v2t = v0`` covers the t winning sets
    ``{v2i, v2i+1, v2i+2}``.
    """

    outer: tuple[Edge, ...] = OUTER_CYCLE
    derived: tuple[tuple[str, tuple[Edge, ...]], ...] = tuple(DERIVED_CYCLES.items())
    bridges: tuple[tuple[str, tuple[Edge, ...]], ...] = tuple(BRIDGES.items())
    left: frozenset[Edge] = LEFT
    right: frozenset[Edge] = RIGHT

    def cycles(self) -> dict[str, tuple[Edge, ...]]:
        return {"C": self.outer, **dict(self.derived)}

    def internal(self) -> frozenset[Edge]:
        return frozenset(_pi7_system().edges) - set(self.outer)

    def preferred(self, edge: Edge) -> str:
        """Cycle to hop along after Breaker's first deletion ``edge``."""
        if edge in self.internal():
            return "C"
        if edge == (5, 6):
            return "C'"
        if edge in self.left:
            return "C''"
        if edge in self.right:
            return "C'''"
        raise StrategyError(f"no cycle avoids a deletion of {edge}")

    def select(self, deleted: Iterable[Edge]) -> tuple[str, tuple[Edge, ...]]:
        """First cycle, in order of preference, that avoids every deleted edge."""
        gone = sorted(deleted)
        cycles = self.cycles()
        if not gone:
            return "C", self.outer
        names = [self.preferred(gone[0])]
        if len(gone) > 1:
            names += [name for name in cycles if name not in names]
        for name in names:
            if not set(cycles[name]) & set(gone):
                return name, cycles[name]
        raise StrategyError(f"every catalog cycle meets the deletions {gone}")

    def check(self, board: WinningSetSystem | None = None) -> None:
        """Raise :class:`StrategyError` unless the catalog matches the Π(7) board."""
        board = board or _pi7_system()
        if board.tournament != build_parity(7):
            raise StrategyError("the cycle catalog describes Π(7) only")

        def set_of(a: Edge, b: Edge, c: Edge) -> int:
            ids = [board.element_id(e) for e in (a, b, c)]
            common = board.element_sets[ids[0]] & board.element_sets[ids[1]]
            common &= board.element_sets[ids[2]] & board.surviving
            if not common:
                raise StrategyError(f"{a}, {b}, {c} is not a winning set")
            return common

        for name, cycle in self.cycles().items():
            if cycle[0] != cycle[-1] or (len(cycle) - 1) % 2:
                raise StrategyError(f"cycle {name} must close and have even length")
            if len(set(cycle[:-1])) != len(cycle) - 1:
                raise StrategyError(f"cycle {name} repeats an element")
            for i in range(0, len(cycle) - 1, 2):
                set_of(cycle[i], cycle[i + 1], cycle[i + 2])
        for name, path in self.bridges:
            set_of(*path[:3])
            set_of(*path[2:])
            for end in (path[0], path[-1]):
                if end not in self.outer or board.degree(board.element_id(end)) != 3:
                    raise StrategyError(f"bridge {name} endpoint {end} is not a degree-3 outer element")
        if self.left | self.right | {FIRST_MOVE, (5, 6)} != set(self.outer):
            raise StrategyError("L, R and the bridge endpoints do not cover the outer cycle")


CATALOG = CycleCatalog()


# ------------------------------------------------------------------
# Cycle hopping
# ------------------------------------------------------------------
class CycleHoppingMaker(StrategyScript):
    """
    The Π(7) Maker.

    Responsibility:
    1. Play on an order-preserving copy of Π(7) given by ``vertex_map`` and
       ignore the rest of the board.
    2. Complete any open threat first.
    3. Open on (1,2); after Breaker's first deletion pick the catalog cycle
       that survives it, then claim v2, v4, ... so every claim forces Breaker,
       ending with a double threat at v(2t-2).

    With ``double_threat=False`` the script gives up hopping at v(2t-2) and
    takes the lowest unclaimed element of its copy from then on.
    """

    role = Player.MAKER

    def __init__(
        self,
        board: WinningSetSystem,
        vertex_map: Sequence[int] = (1, 2, 3, 4, 5, 6, 7),
        double_threat: bool = True,
        name: str = "pi7",
    ):
        super().__init__(board)
        vertex_map = tuple(vertex_map)
        if len(vertex_map) != 7:
            raise ValueError(f"vertex map needs 7 vertices, got {len(vertex_map)}")
        if board.tournament.induced(vertex_map) != build_parity(7):
            raise ValueError(f"vertices {vertex_map} do not span a copy of Π(7)")
        CATALOG.check()
        self.name = name
        self.vertex_map = vertex_map
        self.double_threat = double_threat
        self._element: dict[Edge, int] = {
            (u, v): board.element_id((vertex_map[u - 1], vertex_map[v - 1]))
            for u, v in _pi7_system().edges
        }
        self._edge7 = {e: edge for edge, e in self._element.items()}
        self._support = to_mask(self._element.values())
        self.cycle_name: str | None = None
        self._cycle: tuple[int, ...] = ()
        self._abandoned = False

    @property
    def support(self) -> int:
        return self._support

    @property
    def hops(self) -> tuple[int, ...]:
        """v2, v4, ..., v(2t-2) of the chosen cycle."""
        return self._cycle[2:-1:2]

    def choose(self, state: GameState) -> int:
        self._check_turn(state)
        for threat in threats(state):
            if self._support >> threat.missing & 1:
                return threat.missing
        first = self._element[FIRST_MOVE]
        if not state.maker >> first & 1:
            if state.breaker >> first & 1:
                raise StrategyError(f"opening element {FIRST_MOVE} was deleted")
            return first
        if self.cycle_name is None:
            deleted = [self._edge7[e] for e in iter_bits(state.breaker & self._support)]
            name, cycle = CATALOG.select(deleted)
            self.cycle_name = name
            self._cycle = tuple(self._element[edge] for edge in cycle)
        if not self._abandoned:
            hops = self.hops
            for index, hop in enumerate(hops):
                if state.maker >> hop & 1:
                    continue
                if state.breaker >> hop & 1:
                    raise StrategyError(
                        f"cycle {self.cycle_name} lost its hop {self._edge7[hop]}"
                    )
                if not self.double_threat and index == len(hops) - 1:
                    self._abandoned = True
                    break
                return hop
        inside = state.unclaimed & self._support
        return _lowest(inside or state.unclaimed)

    def snapshot(self) -> Hashable:
        return self.cycle_name, self._abandoned


def maker_pi7(board: WinningSetSystem, double_threat: bool = True) -> CycleHoppingMaker:
    _require_parity(board, (7,), "pi7")
    return CycleHoppingMaker(board, double_threat=double_threat, name="pi7")


def maker_pin(board: WinningSetSystem, double_threat: bool = True) -> CycleHoppingMaker:
    """Cycle hopping restricted to the copy of Π(7) on vertices 1..7 of Π(n), n > 7."""
    _require_parity(board, range(8, board.tournament.n + 1), "pin")
    return CycleHoppingMaker(board, double_threat=double_threat, name="pin")


# ------------------------------------------------------------------
# Random opponent and playouts
# ------------------------------------------------------------------
class RandomPlayer(StrategyScript):
    """Uniformly random unclaimed element; seeded for replayable games."""

    name = "random"

    def __init__(self, board: WinningSetSystem, role: Player, seed: int | None = None):
        super().__init__(board)
        self.role = role
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def choose(self, state: GameState) -> int:
        self._check_turn(state)
        options = list(iter_bits(state.unclaimed))
        if not options:
            raise StrategyError("no unclaimed element left to take")
        return options[int(self._rng.integers(len(options)))]

    def clone(self) -> RandomPlayer:
        return copy.deepcopy(self)


def play_game(
    board: WinningSetSystem,
    maker: StrategyScript,
    breaker: StrategyScript,
    bias: int = 1,
    seed: int | None = None,
) -> Transcript:
    """Play one game between two scripts and record it."""
    if maker.role is not Player.MAKER or breaker.role is not Player.BREAKER:
        raise TypeError("play_game needs a Maker script and a Breaker script")
    state = GameState(board, breaker_bias=bias)
    line: Line = []
    while winner_if_terminal(state) is None:
        if state.to_move is Player.MAKER:
            x = maker.choose(state)
            state = state.play(x)
            line.append((Player.MAKER, [x]))
            continue
        picks = []
        for _ in range(min(state.pending, state.unclaimed.bit_count())):
            y = breaker.choose(state)
            state = state.play(y)
            picks.append(y)
        line.append((Player.BREAKER, picks))
    return Transcript.from_line(board.tournament, line, bias, seed)


# ------------------------------------------------------------------
# Registry
# ------------------------------------------------------------------
SCRIPTS: dict[str, tuple[Player, Callable[..., StrategyScript]]] = {
    "pairing": (Player.BREAKER, breaker_pairing_small),
    "pi6": (Player.BREAKER, breaker_pi6),
    "pi7": (Player.MAKER, maker_pi7),
    "pin": (Player.MAKER, maker_pin),
}


def make_script(
    name: str,
    board: WinningSetSystem,
    role: Player,
    seed: int | None = None,
    double_threat: bool = True,
) -> StrategyScript:
    """Build a script by its CLI name for the given side."""
    if name == "random":
        return RandomPlayer(board, role, seed)
    if name not in SCRIPTS:
        raise ValueError(f"unknown script '{name}' (choose from {', '.join([*SCRIPTS, 'random'])})")
    script_role, factory = SCRIPTS[name]
    if script_role is not role:
        raise ValueError(f"script '{name}' plays {script_role.value}, not {role.value}")
    if role is Player.MAKER:
        return factory(board, double_threat=double_threat)
    return factory(board)
