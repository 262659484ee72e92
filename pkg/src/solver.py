"""Exact Maker-Breaker adjudication and exhaustive strategy verification."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from itertools import chain, combinations

import numpy as np
from colorama import Fore, Style

from src.hypergraph import (
    GameState,
    IllegalMoveError,
    Player,
    WinningSetSystem,
    build_system,
    iter_bits,
    threats,
    to_mask,
    winner_if_terminal,
)
from src.results import SolveResult, ThresholdResult, VerificationResult
from src.strategies import StrategyError, StrategyScript
from src.tournament import Tournament, build_parity
from src.transcript import Line, MoveRecord, Transcript
from thresholds.criteria import es_residual_breaker_win

DEFAULT_SOLVE_BUDGET = 500_000_000
DEFAULT_VERIFY_BUDGET = 1_000_000_000


class BudgetExhausted(RuntimeError):
    """Node budget used up; callers report status ``unknown``."""


# ------------------------------------------------------------------
# Rotation symmetry of odd parity boards
# ------------------------------------------------------------------
class _RotationTables:
    """Byte lookup tables applying every rotation ``i -> i+k (mod n)`` to packed masks."""

    def __init__(self, board: WinningSetSystem):
        t = board.tournament
        n = t.n
        self.element_tables: list[list[list[int]]] = []
        self.set_tables: list[list[list[int]]] = []
        for k in range(1, n):
            def rot(v: int) -> int:
                return (v - 1 + k) % n + 1

            element_perm = [board.element_id((rot(u), rot(v))) for u, v in board.edges]
            set_perm = [board.set_id_of(rot(a), rot(b), rot(c)) for a, b, c in board.triangles]
            self.element_tables.append(self._byte_tables(element_perm))
            self.set_tables.append(self._byte_tables(set_perm))

    @staticmethod
    def _byte_tables(perm: list[int]) -> list[list[int]]:
        tables = []
        for start in range(0, len(perm), 8):
            chunk = perm[start:start + 8]
            table = [0] * 256
            for byte in range(256):
                mask = 0
                for i, target in enumerate(chunk):
                    if byte >> i & 1:
                        mask |= 1 << target
                table[byte] = mask
            tables.append(table)
        return tables

    @staticmethod
    def _apply(tables: list[list[int]], mask: int) -> int:
        out = 0
        for table in tables:
            out |= table[mask & 0xFF]
            mask >>= 8
        return out

    def canonical(self, live: int, mk: int) -> tuple[int, int]:
        best = (live, mk)
        for set_tables, element_tables in zip(self.set_tables, self.element_tables):
            image = (self._apply(set_tables, live), self._apply(element_tables, mk))
            if image < best:
                best = image
        return best


def has_rotation_symmetry(board: WinningSetSystem) -> bool:
    t = board.tournament
    return t.n % 2 == 1 and t.n >= 3 and t == build_parity(t.n)


# ------------------------------------------------------------------
# Solver
# ------------------------------------------------------------------
class ExactSolver:
    """
    The Adjudicator.

    Responsibility:
    1. Decide (1:b) positions under perfect play by depth-first search over
       (live sets, Maker's elements in live sets), Breaker's turn taken as one
       b-subset of live elements.
    2. Prune with threat forcing, double-threat detection, the biased
       potential criterion and a transposition table (rotation-canonical on
       odd parity boards).
    3. Walk a principal line for the winner and report it as a transcript.
    """

    def __init__(
        self,
        board: WinningSetSystem,
        breaker_bias: int = 1,
        budget: int = DEFAULT_SOLVE_BUDGET,
        use_symmetry: bool = True,
        order_seed: int | None = None,
    ):
        if breaker_bias < 1:
            raise ValueError(f"Breaker bias must be >= 1, got {breaker_bias}")
        if budget < 1:
            raise ValueError(f"node budget must be >= 1, got {budget}")
        self.board = board
        self.breaker_bias = breaker_bias
        self.budget = budget
        self.order_seed = order_seed
        self.nodes = 0
        self._limit = budget
        self._set_masks = board.set_masks
        self._element_sets = board.element_sets
        self._maker_memo: dict[tuple[int, int], bool] = {}
        self._breaker_memo: dict[tuple[int, int, int], bool] = {}
        self._rotations = (
            _RotationTables(board) if use_symmetry and has_rotation_symmetry(board) else None
        )
        if order_seed is None:
            self._priority = list(range(board.n_elements))
        else:
            rng = np.random.default_rng(order_seed)
            self._priority = [int(v) for v in rng.permutation(board.n_elements)]

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------
    def solve(self, state: GameState | None = None, jobs: int = 1) -> SolveResult:
        state = state or GameState(self.board, breaker_bias=self.breaker_bias)
        self._check_state(state)
        print(
            f"{Fore.CYAN}[*] Solving {self.board!r} at bias (1:{self.breaker_bias})..."
            f"{Style.RESET_ALL}"
        )
        parallel = (
            jobs > 1
            and state.to_move is Player.MAKER
            and winner_if_terminal(state) is None
            and not threats(state)
        )
        try:
            if parallel:
                maker_wins, first = self._root_parallel(state, jobs)
            else:
                maker_wins, first = self._evaluate(state), None
        except BudgetExhausted:
            print(f"{Fore.YELLOW}[!] Budget of {self.budget} nodes exhausted.{Style.RESET_ALL}")
            return SolveResult(
                status="unknown",
                breaker_bias=self.breaker_bias,
                nodes=self.nodes,
                budget=self.budget,
            )
        winner = Player.MAKER if maker_wins else Player.BREAKER
        print(f"    > Winner: {winner.value} ({self.nodes} nodes)")
        line = self._principal_line(state, first)
        records = [
            MoveRecord(player=p, elements=[tuple(self.board.edge(e)) for e in elements])
            for p, elements in line or []
        ]
        transcript = None
        if line is not None and self.board.is_pristine and not (state.maker | state.breaker):
            transcript = Transcript.from_line(self.board.tournament, line, self.breaker_bias)
        return SolveResult(
            status="solved",
            winner=winner,
            breaker_bias=self.breaker_bias,
            nodes=self.nodes,
            budget=self.budget,
            line=records,
            transcript=transcript,
        )

    def maker_wins(self, state: GameState) -> bool:
        """Value of ``state`` (True iff Maker wins); raises :class:`BudgetExhausted`."""
        self._check_state(state)
        return self._evaluate(state)

    # ------------------------------------------------------------------
    # Search
    # ------------------------------------------------------------------
    def _check_state(self, state: GameState) -> None:
        if state.board is not self.board and state.board != self.board:
            raise ValueError("state belongs to a different board")
        if state.maker_bias != 1:
            raise ValueError(f"only Maker bias 1 is supported, got {state.maker_bias}")
        if state.breaker_bias != self.breaker_bias:
            raise ValueError(
                f"state has Breaker bias {state.breaker_bias}, solver {self.breaker_bias}"
            )

    def _live(self, state: GameState) -> int:
        return self.board.surviving & ~self._sets_hit(state.breaker)

    def _evaluate(self, state: GameState) -> bool:
        winner = winner_if_terminal(state)
        if winner is not None:
            return winner is Player.MAKER
        live = self._live(state)
        if state.to_move is Player.MAKER:
            return self._maker_turn(live, state.maker)
        return self._breaker_turn(live, state.maker, state.pending)

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self._limit:
            raise BudgetExhausted(f"node budget {self.budget} exhausted")

    def _union(self, sets: int) -> int:
        mask = 0
        for sid in iter_bits(sets):
            mask |= self._set_masks[sid]
        return mask

    def _sets_hit(self, elements: int) -> int:
        mask = 0
        for eid in iter_bits(elements):
            mask |= self._element_sets[eid]
        return mask

    def _key(self, live: int, mk: int) -> tuple[int, int]:
        mk &= self._union(live)
        if self._rotations is not None:
            return self._rotations.canonical(live, mk)
        return live, mk

    def _maker_turn(self, live: int, mk: int) -> bool:
        if not live:
            return False
        key = self._key(live, mk)
        cached = self._maker_memo.get(key)
        if cached is not None:
            return cached
        self._tick()
        result = self._maker_value(live, mk)
        self._maker_memo[key] = result
        return result

    def _maker_value(self, live: int, mk: int) -> bool:
        b = self.breaker_bias
        near = fresh = 0
        for sid in iter_bits(live):
            held = (self._set_masks[sid] & mk).bit_count()
            if held >= 2:
                return True
            if held:
                near += 1
            else:
                fresh += 1
        if es_residual_breaker_win(near, fresh, b):
            return False
        moves = self._maker_moves(live, mk)
        if any(missing.bit_count() > b for _, missing in moves):
            return True
        return any(self._breaker_turn(live, mk | 1 << x, b) for x, _ in moves)

    def _maker_moves(self, live: int, mk: int) -> list[tuple[int, int]]:
        """Live unclaimed elements as ``(element, new threat mask)``, best first."""
        scored = []
        for x in iter_bits(self._union(live) & ~mk):
            bit = 1 << x
            missing = degree = 0
            for sid in iter_bits(self._element_sets[x] & live):
                degree += 1
                rest = self._set_masks[sid] & ~bit
                if rest & mk:
                    missing |= rest & ~mk
            scored.append((-missing.bit_count(), -degree, self._priority[x], x, missing))
        scored.sort()
        return [(x, missing) for *_, x, missing in scored]

    def _breaker_turn(self, live: int, mk: int, pending: int) -> bool:
        if not live:
            return False
        key = (*self._key(live, mk), pending)
        cached = self._breaker_memo.get(key)
        if cached is not None:
            return cached
        self._tick()
        result = self._breaker_value(live, mk, pending)
        self._breaker_memo[key] = result
        return result

    def _forced(self, live: int, mk: int) -> int:
        forced = 0
        for sid in iter_bits(live):
            mask = self._set_masks[sid]
            if (mask & mk).bit_count() == 2:
                forced |= mask & ~mk
        return forced

    def _breaker_value(self, live: int, mk: int, pending: int) -> bool:
        forced = self._forced(live, mk)
        if forced.bit_count() > pending:
            return True
        live &= ~self._sets_hit(forced)
        r = pending - forced.bit_count()
        if not live:
            return False
        candidates = self._union(live) & ~mk
        if candidates.bit_count() <= r:
            return False
        if r == 0:
            return self._maker_turn(live, mk)
        for combo in combinations(self._breaker_moves(live, mk, candidates), r):
            if not self._maker_turn(live & ~self._sets_hit(to_mask(combo)), mk):
                return False
        return True

    def _breaker_moves(self, live: int, mk: int, candidates: int) -> list[int]:
        scored = []
        for y in iter_bits(candidates):
            danger = degree = 0
            for sid in iter_bits(self._element_sets[y] & live):
                degree += 1
                if self._set_masks[sid] & mk:
                    danger += 1
            scored.append((-danger, -degree, self._priority[y], y))
        scored.sort()
        return [y for *_, y in scored]

    # ------------------------------------------------------------------
    # Principal line
    # ------------------------------------------------------------------
    def _principal_line(self, state: GameState, first: int | None = None) -> Line | None:
        """Replay optimal play from ``state``; None if the walk runs out of budget."""
        self._limit = self.nodes + self.budget
        line: Line = []
        try:
            while winner_if_terminal(state) is None:
                if state.to_move is Player.MAKER:
                    x = first if first is not None else self._pick_maker(state)
                    first = None
                    line.append((Player.MAKER, [x]))
                    state = state.play(x)
                else:
                    picks = self._pick_breaker(state)
                    line.append((Player.BREAKER, picks))
                    state = state.play_many(picks)
        except BudgetExhausted:
            print(f"{Fore.YELLOW}[!] Principal line truncated by budget.{Style.RESET_ALL}")
            return None
        return line

    def _pick_maker(self, state: GameState) -> int:
        open_threats = threats(state)
        if open_threats:
            return open_threats[0].missing
        live, mk = self._live(state), state.maker
        moves = [x for x, _ in self._maker_moves(live, mk)]
        if self._maker_turn(live, mk):
            for x in moves:
                if self._breaker_turn(live, mk | 1 << x, self.breaker_bias):
                    return x
        return moves[0]

    def _pick_breaker(self, state: GameState) -> list[int]:
        live, mk, pending = self._live(state), state.maker, state.pending
        forced = self._forced(live, mk)
        picks = list(iter_bits(forced))[:pending]
        r = pending - len(picks)
        rest = live & ~self._sets_hit(forced)
        candidates = self._union(rest) & ~mk
        if forced.bit_count() <= pending and rest and r:
            if candidates.bit_count() <= r:
                picks += list(iter_bits(candidates))
            else:
                combos = combinations(self._breaker_moves(rest, mk, candidates), r)
                first = next(combos)
                chosen = next(
                    (
                        combo
                        for combo in chain((first,), combos)
                        if not self._maker_turn(rest & ~self._sets_hit(to_mask(combo)), mk)
                    ),
                    first,
                )
                picks += list(chosen)
        spare = iter_bits(state.unclaimed & ~to_mask(picks))
        need = min(pending, state.unclaimed.bit_count())
        while len(picks) < need:
            picks.append(next(spare))
        return picks

    # ------------------------------------------------------------------
    # Root parallelism
    # ------------------------------------------------------------------
    def _root_parallel(self, state: GameState, jobs: int) -> tuple[bool, int | None]:
        live = self._live(state)
        moves = [x for x, _ in self._maker_moves(live, state.maker)]
        share = (self._limit - self.nodes) // len(moves) if moves else 0
        if share < 1:
            return self._evaluate(state), None
        payloads = [
            (
                self.board.tournament.to_text(),
                self.board.surviving,
                state.maker | 1 << x,
                state.breaker,
                self.breaker_bias,
                share,
                self._rotations is not None,
                self.order_seed,
            )
            for x in moves
        ]
        print(f"    > Root split: {len(moves)} first moves over {jobs} workers, {share} nodes each")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_solve_child, payloads))
        self.nodes += sum(nodes for _, nodes in outcomes)
        if any(value is True for value, _ in outcomes):
            return True, next(x for x, (v, _) in zip(moves, outcomes) if v is True)
        if any(value is None for value, _ in outcomes):
            raise BudgetExhausted("a root branch exhausted its budget")
        return False, moves[0]


def _solve_child(payload: tuple) -> tuple[bool | None, int]:
    """Worker entry: value of one first-ply child rebuilt from plain data."""
    text, surviving, maker, breaker, bias, budget, symmetric, order_seed = payload
    board = build_system(Tournament.from_text(text)).restricted(surviving)
    state = GameState(board, maker=maker, breaker=breaker, breaker_bias=bias, to_move=Player.BREAKER)
    solver = ExactSolver(board, bias, budget, use_symmetry=symmetric, order_seed=order_seed)
    try:
        return solver.maker_wins(state), solver.nodes
    except BudgetExhausted:
        return None, budget


def solve(
    state: GameState,
    budget: int = DEFAULT_SOLVE_BUDGET,
    jobs: int = 1,
    use_symmetry: bool = True,
    order_seed: int | None = None,
) -> SolveResult:
    """Winner of ``state`` under perfect play, with a principal line."""
    solver = ExactSolver(
        state.board, state.breaker_bias, budget, use_symmetry=use_symmetry, order_seed=order_seed
    )
    return solver.solve(state, jobs=jobs)


def threshold_bias_exact(
    t: Tournament, budget: int = DEFAULT_SOLVE_BUDGET, jobs: int = 1
) -> ThresholdResult:
    """Smallest b for which Breaker wins (1:b) on ``t``."""
    board = build_system(t)
    winners: dict[int, Player] = {}
    nodes = 0
    for b in range(1, max(board.n_elements, 1) + 1):
        result = solve(GameState(board, breaker_bias=b), budget=budget, jobs=jobs)
        nodes += result.nodes
        if result.status == "unknown":
            return ThresholdResult(status="unknown", winners=winners, nodes=nodes, budget=budget)
        winners[b] = result.winner
        if result.winner is Player.BREAKER:
            return ThresholdResult(
                status="solved", b_star=b, winners=winners, nodes=nodes, budget=budget
            )
    raise RuntimeError("Breaker must win once her bias covers the whole board")


# ------------------------------------------------------------------
# Strategy verification
# ------------------------------------------------------------------
class StrategyVerifier:
    """
    The Adversary.

    Responsibility:
    1. Play a scripted strategy against every line of the opponent, cloning
       the script at each branch.
    2. Memoise on (Maker elements, Breaker elements, script snapshot).
    3. Report the first refuting line, in ascending element order, as a
       counterexample transcript.

    When a Maker script declares a ``support`` (all of its winning sets lie
    inside it and it ignores moves elsewhere), Breaker deletions outside the
    support are collapsed to the lowest-id representatives.
    """

    def __init__(
        self, board: WinningSetSystem, breaker_bias: int = 1, budget: int = DEFAULT_VERIFY_BUDGET
    ):
        if breaker_bias < 1:
            raise ValueError(f"Breaker bias must be >= 1, got {breaker_bias}")
        self.board = board
        self.breaker_bias = breaker_bias
        self.budget = budget
        self.nodes = 0
        self.message = ""
        self._memo: dict[tuple, Line | None] = {}
        self._support: int | None = None
        self._support_sets = board.surviving

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------
    def verify_maker(self, script: StrategyScript) -> VerificationResult:
        if script.role is not Player.MAKER:
            raise TypeError(f"script '{script.name}' plays {script.role.value}, not Maker")
        self._reset(script.support)
        print(f"{Fore.CYAN}[*] Verifying Maker script '{script.name}' on {self.board!r}...{Style.RESET_ALL}")
        return self._run(Player.MAKER, script, self._maker_node)

    def verify_breaker(self, script: StrategyScript) -> VerificationResult:
        if script.role is not Player.BREAKER:
            raise TypeError(f"script '{script.name}' plays {script.role.value}, not Breaker")
        self._reset(None)
        print(f"{Fore.CYAN}[*] Verifying Breaker script '{script.name}' on {self.board!r}...{Style.RESET_ALL}")
        return self._run(Player.BREAKER, script, self._breaker_node)

    # ------------------------------------------------------------------
    # Internals
    # ------------------------------------------------------------------
    def _reset(self, support: int | None) -> None:
        self.nodes = 0
        self.message = ""
        self._memo = {}
        self._support = support
        if support is None:
            self._support_sets = self.board.surviving
        else:
            self._support_sets = 0
            for sid in iter_bits(self.board.surviving):
                if self.board.set_masks[sid] & ~support == 0:
                    self._support_sets |= 1 << sid

    def _run(self, role: Player, script: StrategyScript, node) -> VerificationResult:
        state = GameState(self.board, breaker_bias=self.breaker_bias)
        try:
            line = node(state, script.clone())
        except BudgetExhausted:
            print(f"{Fore.YELLOW}[!] Budget of {self.budget} nodes exhausted.{Style.RESET_ALL}")
            return VerificationResult(
                status="unknown",
                role=role,
                script=script.name,
                breaker_bias=self.breaker_bias,
                nodes=self.nodes,
                budget=self.budget,
                message="budget exhausted",
            )
        if line is None:
            print(f"{Fore.GREEN}[+] Script '{script.name}' wins every line ({self.nodes} nodes).{Style.RESET_ALL}")
            return VerificationResult(
                status="ok",
                role=role,
                script=script.name,
                breaker_bias=self.breaker_bias,
                nodes=self.nodes,
                budget=self.budget,
            )
        print(f"{Fore.RED}[!] Script '{script.name}' refuted after {len(line)} turns.{Style.RESET_ALL}")
        return VerificationResult(
            status="counterexample",
            role=role,
            script=script.name,
            breaker_bias=self.breaker_bias,
            nodes=self.nodes,
            budget=self.budget,
            counterexample=Transcript.from_line(self.board.tournament, line, self.breaker_bias),
            message=self.message or "opponent wins",
        )

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted(f"node budget {self.budget} exhausted")

    def _fail(self, line: Line, message: str) -> Line:
        if not self.message:
            self.message = message
        return line

    # Maker scripts ----------------------------------------------------
    def _maker_verdict(self, state: GameState) -> Player | None:
        board = self.board
        for sid in iter_bits(board.sets_hit(state.maker) & board.surviving):
            if board.set_masks[sid] & ~state.maker == 0:
                return Player.MAKER
        if self._support_sets & ~board.sets_hit(state.breaker) == 0:
            return Player.BREAKER
        if state.unclaimed == 0:
            return Player.BREAKER
        return None

    def _breaker_key(self, breaker: int) -> tuple[int, int]:
        if self._support is None:
            return breaker, 0
        return breaker & self._support, (breaker & ~self._support).bit_count()

    def _breaker_replies(self, state: GameState) -> list[tuple[int, ...]]:
        unclaimed = state.unclaimed
        r = min(state.pending, unclaimed.bit_count())
        if self._support is None:
            return list(combinations(iter_bits(unclaimed), r))
        inside = list(iter_bits(unclaimed & self._support))
        reps = list(iter_bits(unclaimed & ~self._support))[:r]
        rep_set = set(reps)
        replies = []
        for combo in combinations(sorted(inside + reps), r):
            used = [e for e in combo if e in rep_set]
            if used == reps[: len(used)]:
                replies.append(combo)
        return replies

    def _maker_node(self, state: GameState, script: StrategyScript) -> Line | None:
        key = (state.maker, *self._breaker_key(state.breaker), script.snapshot())
        if key in self._memo:
            return self._memo[key]
        self._tick()
        result = self._maker_node_value(state, script)
        self._memo[key] = result
        return result

    def _maker_node_value(self, state: GameState, script: StrategyScript) -> Line | None:
        verdict = self._maker_verdict(state)
        if verdict is not None:
            return None if verdict is Player.MAKER else self._fail([], "all Maker sets blocked")
        try:
            x = script.choose(state)
            after = state.play(x)
        except (IllegalMoveError, StrategyError) as exc:
            return self._fail([], f"script error: {exc}")
        head: Line = [(Player.MAKER, [x])]
        verdict = self._maker_verdict(after)
        if verdict is not None:
            return None if verdict is Player.MAKER else self._fail(head, "all Maker sets blocked")
        for combo in self._breaker_replies(after):
            reply = after.play_many(combo)
            turn = head + [(Player.BREAKER, list(combo))]
            if self._maker_verdict(reply) is Player.BREAKER:
                return self._fail(turn, "all Maker sets blocked")
            sub = self._maker_node(reply, script.clone())
            if sub is not None:
                return turn + sub
        return None

    # Breaker scripts --------------------------------------------------
    def _breaker_node(self, state: GameState, script: StrategyScript) -> Line | None:
        key = (state.maker, state.breaker, script.snapshot())
        if key in self._memo:
            return self._memo[key]
        self._tick()
        result = self._breaker_node_value(state, script)
        self._memo[key] = result
        return result

    def _breaker_node_value(self, state: GameState, script: StrategyScript) -> Line | None:
        winner = winner_if_terminal(state)
        if winner is not None:
            return None if winner is Player.BREAKER else self._fail([], "Maker completed a set")
        for x in iter_bits(state.unclaimed):
            after = state.play(x)
            head: Line = [(Player.MAKER, [x])]
            winner = winner_if_terminal(after)
            if winner is Player.MAKER:
                return self._fail(head, "Maker completed a set")
            if winner is Player.BREAKER:
                continue
            branch = script.clone()
            picks: list[int] = []
            try:
                for _ in range(min(after.pending, after.unclaimed.bit_count())):
                    y = branch.choose(after)
                    after = after.play(y)
                    picks.append(y)
            except (IllegalMoveError, StrategyError) as exc:
                return self._fail(head, f"script error: {exc}")
            turn = head + [(Player.BREAKER, picks)]
            sub = self._breaker_node(after, branch)
            if sub is not None:
                return turn + sub
        return None


def verify_maker_strategy(
    script: StrategyScript,
    board: WinningSetSystem,
    bias: int = 1,
    budget: int = DEFAULT_VERIFY_BUDGET,
) -> VerificationResult:
    """Play a Maker script against every Breaker line."""
    return StrategyVerifier(board, bias, budget).verify_maker(script)


def verify_breaker_strategy(
    script: StrategyScript,
    board: WinningSetSystem,
    bias: int = 1,
    budget: int = DEFAULT_VERIFY_BUDGET,
) -> VerificationResult:
    """Play a Breaker script against every Maker line."""
    return StrategyVerifier(board, bias, budget).verify_breaker(script)
