"""Tests for the scripted pairing and cycle-hopping strategies."""
from __future__ import annotations

import pytest

from src.hypergraph import (
    GameState,
    Pairing,
    PairingError,
    Player,
    build_system,
    compute_switch_cascade,
    threats,
    winner_if_terminal,
)
from src.solver import solve, verify_breaker_strategy, verify_maker_strategy
from src.strategies import (
    CATALOG,
    OUTER_CYCLE,
    PI6_DEFAULT_PAIRS,
    PI6_SPARE,
    CycleHoppingMaker,
    PairingBreaker,
    RandomPlayer,
    StrategyError,
    StrategyScript,
    breaker_pairing_small,
    breaker_pi6,
    make_script,
    maker_pi7,
    maker_pin,
    play_game,
)
from src.tournament import build_parity, sample_random
from src.transcript import replay


# ------------------------------------------------------------------
# Helpers
# ------------------------------------------------------------------
class ThreatResponder(StrategyScript):
    """Breaker that blocks the lowest open threat, else deletes the lowest element."""

    role = Player.BREAKER
    name = "threat-responder"

    def choose(self, state: GameState) -> int:
        open_threats = threats(state)
        if open_threats:
            return open_threats[0].missing
        return (state.unclaimed & -state.unclaimed).bit_length() - 1


class OpeningResponder(ThreatResponder):
    """Threat responder with a fixed first deletion."""

    def __init__(self, board, opening: int):
        super().__init__(board)
        self.opening = opening

    def choose(self, state: GameState) -> int:
        if not state.breaker:
            return self.opening
        return super().choose(state)


@pytest.fixture()
def pi6_board():
    return build_system(build_parity(6))


@pytest.fixture()
def pi7_board():
    return build_system(build_parity(7))


# ==================================================================
# TestPairingBreakers
# ==================================================================
class TestPairingBreakers:
    """Pairing strategies win Π(3)..Π(6) against every Maker line."""

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_small_pairing_wins(self, n: int) -> None:
        board = build_system(build_parity(n))
        result = verify_breaker_strategy(breaker_pairing_small(board), board)
        assert result.ok, result.message

    def test_pi6_wins(self, pi6_board) -> None:
        result = verify_breaker_strategy(breaker_pi6(pi6_board), pi6_board)
        assert result.ok, result.message
        assert result.nodes > 0

    def test_small_pairing_rejects_larger_board(self) -> None:
        with pytest.raises(ValueError, match="cannot play"):
            breaker_pairing_small(build_system(build_parity(7)))

    def test_invalid_pairing_rejected(self) -> None:
        board = build_system(build_parity(5))
        with pytest.raises(PairingError, match="does not block"):
            PairingBreaker(board, Pairing.from_edges(board, [((1, 2), (3, 1))]))

    def test_pairing_answers_partner(self) -> None:
        board = build_system(build_parity(5))
        breaker = breaker_pairing_small(board)
        state = GameState(board).play(board.element_id((1, 2)))
        assert breaker.choose(state) == board.element_id((3, 1))


# ==================================================================
# TestSwitchCascade
# ==================================================================
class TestSwitchCascade:
    """Cascade lengths of the Π(6) default pairing after the (2,5) cut."""

    @pytest.mark.parametrize(
        "edge,length",
        [
            ((5, 3), 2), ((4, 5), 2),
            ((5, 6), 3), ((5, 1), 3), ((1, 4), 3), ((6, 4), 3),
            ((1, 2), 1), ((6, 2), 1), ((3, 1), 1), ((3, 4), 1), ((4, 2), 1), ((3, 6), 1),
            ((2, 3), 0), ((1, 6), 0),
        ],
    )
    def test_cascade_length(self, pi6_board, edge, length) -> None:
        remaining = pi6_board.cut((2, 5))
        pairing = Pairing.from_edges(pi6_board, PI6_DEFAULT_PAIRS)
        spare = pi6_board.element_id(PI6_SPARE)
        m = pi6_board.element_id(edge)
        result = compute_switch_cascade(remaining, pairing, m, spare)
        assert result.cascade_length == length
        assert result.partner(m) is None

    def test_paired_spare_rejected(self, pi6_board) -> None:
        pairing = Pairing.from_edges(pi6_board, PI6_DEFAULT_PAIRS)
        with pytest.raises(PairingError, match="already paired"):
            compute_switch_cascade(
                pi6_board, pairing, pi6_board.element_id((5, 3)), pi6_board.element_id((1, 2))
            )

    def test_pi6_opening_on_two_five(self, pi6_board) -> None:
        breaker = breaker_pi6(pi6_board)
        state = GameState(pi6_board).play(pi6_board.element_id((2, 5)))
        assert breaker.choose(state) == pi6_board.element_id((6, 2))
        assert breaker.phase == "answered (2,5)"

    def test_second_cut_cascades_on_four_sets(self, pi6_board) -> None:
        breaker = breaker_pi6(pi6_board)
        state = GameState(pi6_board).play(pi6_board.element_id((2, 5)))
        state = state.play(breaker.choose(state))
        state = state.play(pi6_board.element_id((5, 6)))
        assert breaker.choose(state) == pi6_board.element_id((5, 1))
        assert breaker.phase == "pairing"
        assert breaker.cascade_length == 3
        assert breaker.pairing.partner(pi6_board.element_id((5, 6))) is None


# ==================================================================
# TestCycleCatalog
# ==================================================================
class TestCycleCatalog:
    """The Π(7) cycle catalog matches the board."""

    def test_catalog_checks(self, pi7_board) -> None:
        CATALOG.check(pi7_board)

    def test_outer_cycle_covers_seven_sets(self, pi7_board) -> None:
        assert len(OUTER_CYCLE) - 1 == 14
        assert len(set(OUTER_CYCLE)) == 14

    def test_every_first_deletion_leaves_a_cycle(self, pi7_board) -> None:
        for edge in pi7_board.edges:
            if edge == (1, 2):
                continue
            name, cycle = CATALOG.select([edge])
            assert name == CATALOG.preferred(edge)
            assert edge not in cycle

    def test_bridge_endpoints_have_degree_three(self, pi7_board) -> None:
        for _, path in CATALOG.bridges:
            for end in (path[0], path[-1]):
                assert pi7_board.degree(pi7_board.element_id(end)) == 3

    def test_catalog_rejects_other_board(self) -> None:
        with pytest.raises(StrategyError, match="Π\\(7\\) only"):
            CATALOG.check(build_system(build_parity(9)))


# ==================================================================
# TestCycleHopping
# ==================================================================
class TestCycleHopping:
    """Cycle hopping wins Π(7) and its copies inside larger boards."""

    def test_pi7_wins_every_line(self, pi7_board) -> None:
        result = verify_maker_strategy(maker_pi7(pi7_board), pi7_board)
        assert result.ok, result.message

    @pytest.mark.parametrize("n", [8, 9])
    def test_pin_wins_larger_boards(self, n: int) -> None:
        board = build_system(build_parity(n))
        result = verify_maker_strategy(maker_pin(board), board)
        assert result.ok, result.message

    def test_mutation_is_refuted(self, pi7_board) -> None:
        result = verify_maker_strategy(maker_pi7(pi7_board, double_threat=False), pi7_board)
        assert result.status == "counterexample"
        assert result.counterexample is not None
        check = replay(result.counterexample)
        assert check.ok
        assert check.winner is Player.BREAKER

    def test_beats_threat_responder(self, pi7_board) -> None:
        transcript = play_game(pi7_board, maker_pi7(pi7_board), ThreatResponder(pi7_board))
        assert transcript.winner is Player.MAKER
        assert replay(transcript).ok

    def test_beats_random_breakers(self, pi7_board) -> None:
        for seed in range(10):
            breaker = RandomPlayer(pi7_board, Player.BREAKER, seed)
            assert play_game(pi7_board, maker_pi7(pi7_board), breaker).winner is Player.MAKER

    def test_embedded_copy(self) -> None:
        t = build_parity(11)
        board = build_system(t)
        script = CycleHoppingMaker(board, vertex_map=(3, 4, 5, 6, 7, 8, 9), name="embedded")
        assert script.support.bit_count() == 21
        assert verify_maker_strategy(script, board).ok

    def test_bad_vertex_map(self) -> None:
        board = build_system(build_parity(9))
        with pytest.raises(ValueError, match="do not span"):
            CycleHoppingMaker(board, vertex_map=(1, 2, 3, 4, 5, 6, 8))
        with pytest.raises(ValueError, match="7 vertices"):
            CycleHoppingMaker(board, vertex_map=(1, 2, 3))

    def test_hops_of_outer_cycle(self, pi7_board) -> None:
        script = maker_pi7(pi7_board)
        state = GameState(pi7_board).play(pi7_board.element_id((1, 2)))
        state = state.play(pi7_board.element_id((1, 4)))
        first_hop = script.choose(state)
        assert script.cycle_name == "C"
        assert pi7_board.edge(first_hop) == (2, 3)

    def test_every_hop_forces_one_threat(self, pi7_board) -> None:
        for edge in pi7_board.edges:
            if edge == (1, 2):
                continue
            maker = maker_pi7(pi7_board)
            breaker = OpeningResponder(pi7_board, pi7_board.element_id(edge))
            state = GameState(pi7_board)
            claims = 0
            while winner_if_terminal(state) is None:
                if state.to_move is Player.BREAKER:
                    state = state.play(breaker.choose(state))
                    continue
                x = maker.choose(state)
                state = state.play(x)
                claims += 1
                if claims == 1 or winner_if_terminal(state) is Player.MAKER:
                    continue
                created = [t for t in threats(state) if pi7_board.set_masks[t.set_id] >> x & 1]
                if x == maker.hops[-1]:
                    assert len(created) == 2, edge
                    assert len(threats(state)) == 2, edge
                else:
                    assert len(created) == 1, edge
            assert winner_if_terminal(state) is Player.MAKER, edge


# ==================================================================
# TestAgreementWithSolver
# ==================================================================
class TestAgreementWithSolver:
    """A script that verifies wins for the side the solver names."""

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
    def test_scripts_match_solver(self, n: int) -> None:
        board = build_system(build_parity(n))
        if n == 7:
            verdict = verify_maker_strategy(maker_pi7(board), board)
            winner = Player.MAKER
        else:
            script = breaker_pi6(board) if n == 6 else breaker_pairing_small(board)
            verdict = verify_breaker_strategy(script, board)
            winner = Player.BREAKER
        assert verdict.ok, verdict.message
        assert solve(GameState(board)).winner is winner


# ==================================================================
# TestRegistry
# ==================================================================
class TestRegistry:
    """Script lookup by name."""

    def test_known_names(self) -> None:
        board = build_system(build_parity(7))
        assert make_script("pi7", board, Player.MAKER).name == "pi7"
        assert make_script("random", board, Player.BREAKER, seed=1).role is Player.BREAKER

    def test_unknown_name(self) -> None:
        with pytest.raises(ValueError, match="unknown script"):
            make_script("greedy", build_system(build_parity(7)), Player.MAKER)

    def test_wrong_role(self) -> None:
        with pytest.raises(ValueError, match="plays breaker"):
            make_script("pi6", build_system(build_parity(6)), Player.MAKER)

    def test_random_player_is_seeded(self) -> None:
        board = build_system(sample_random(8, 0.5, 2))
        games = [
            play_game(
                board,
                RandomPlayer(board, Player.MAKER, 5),
                RandomPlayer(board, Player.BREAKER, 6),
            ).to_json()
            for _ in range(2)
        ]
        assert games[0] == games[1]
