"""Tests for the winning-set hypergraph, game states, pairings and transcripts."""
from __future__ import annotations

import numpy as np
import pytest

from src.hypergraph import (
    GameState,
    IllegalMoveError,
    Pairing,
    PairingError,
    Player,
    Threat,
    build_system,
    iter_bits,
    threats,
    to_mask,
    validate_pairing,
    winner_if_terminal,
)
from src.strategies import RandomPlayer, play_game
from src.tournament import (
    DirectedEdge,
    build_parity,
    build_transitive,
    sample_random,
    w_closed_form,
)
from src.transcript import MoveRecord, Transcript, replay


# ------------------------------------------------------------------
# Helpers
# ------------------------------------------------------------------
def _random_game(board, seed: int, bias: int = 1) -> Transcript:
    maker = RandomPlayer(board, Player.MAKER, seed)
    breaker = RandomPlayer(board, Player.BREAKER, seed + 1000)
    return play_game(board, maker, breaker, bias=bias, seed=seed)


# ==================================================================
# TestWinningSets
# ==================================================================
class TestWinningSets:
    """One 3-element set per directed triangle."""

    def test_set_count_matches_triangles(self) -> None:
        for n in range(3, 10):
            board = build_system(build_parity(n))
            assert board.surviving.bit_count() == w_closed_form(n)
            assert board.n_elements == n * (n - 1) // 2

    def test_sets_have_three_elements(self) -> None:
        board = build_system(build_parity(7))
        assert all(mask.bit_count() == 3 for mask in board.set_masks)

    def test_pair_degree_is_one(self) -> None:
        for n in range(3, 13):
            assert build_system(build_parity(n)).max_pair_degree() == 1
        for seed in range(10):
            board = build_system(sample_random(9, 0.5, seed))
            assert board.max_pair_degree() <= 1

    def test_set_id_of_any_rotation(self) -> None:
        board = build_system(build_parity(7))
        sid = board.set_id_of(1, 2, 7)
        assert board.set_id_of(2, 7, 1) == sid == board.set_id_of(7, 1, 2)
        with pytest.raises(ValueError, match="not a directed triangle"):
            board.set_id_of(1, 7, 2)

    def test_element_id_checks_orientation(self) -> None:
        board = build_system(build_parity(5))
        assert board.edge(board.element_id((3, 1))) == (3, 1)
        with pytest.raises(ValueError, match="opposite orientation"):
            board.element_id((1, 3))

    def test_degrees_on_parity_seven(self) -> None:
        board = build_system(build_parity(7))
        degrees = [board.degree(e) for e in range(board.n_elements)]
        assert sum(degrees) == 3 * 14
        assert max(degrees) == 3
        assert board.degree(board.element_id((1, 6))) == 1


# ==================================================================
# TestCut
# ==================================================================
class TestCut:
    """Cutting drops touched sets and orphaned elements."""

    def test_elements_and_sets_views(self) -> None:
        board = build_system(build_parity(3))
        edges = [DirectedEdge(1, 2), DirectedEdge(3, 1), DirectedEdge(2, 3)]
        assert board.elements == edges
        assert board.sets == [frozenset(edges)]
        cut = board.cut((2, 3))
        assert cut.elements == []
        assert cut.sets == []

    def test_cut_only_set(self) -> None:
        board = build_system(build_parity(3)).cut((1, 2))
        assert board.surviving == 0
        assert board.element_mask == 0
        assert not board.is_pristine

    def test_cut_keeps_other_sets(self) -> None:
        board = build_system(build_parity(5))
        e = board.element_id((1, 2))
        cut = board.cut(e)
        assert cut.surviving.bit_count() == 5 - board.degree(e)
        for sid in iter_bits(cut.surviving):
            assert not board.set_masks[sid] >> e & 1
        assert cut.element_mask == cut.union(cut.surviving)

    def test_cut_commutes_and_is_idempotent(self) -> None:
        rng = np.random.default_rng(7)
        for _ in range(100):
            board = build_system(sample_random(int(rng.integers(4, 9)), 0.5, rng))
            x, y = (int(v) for v in rng.choice(board.n_elements, size=2, replace=False))
            assert board.cut(x).cut(y) == board.cut(y).cut(x)
            assert board.cut(x).cut(x) == board.cut(x)

    def test_cut_unknown_element(self) -> None:
        with pytest.raises(ValueError, match="unknown element"):
            build_system(build_parity(4)).cut(99)


# ==================================================================
# TestGameState
# ==================================================================
class TestGameState:
    """Turn order, legality, threats and terminal positions."""

    def test_turns_alternate_with_bias(self) -> None:
        board = build_system(build_parity(5))
        s = GameState(board, breaker_bias=2).play(0)
        assert s.to_move is Player.BREAKER and s.pending == 2
        s = s.play(1)
        assert s.to_move is Player.BREAKER and s.pending == 1
        s = s.play(2)
        assert s.to_move is Player.MAKER and s.pending == 1

    def test_reclaim_is_illegal(self) -> None:
        s = GameState(build_system(build_parity(4))).play(0)
        with pytest.raises(IllegalMoveError, match="already claimed"):
            s.play(0)
        with pytest.raises(IllegalMoveError, match="not on the board"):
            s.play(42)

    def test_inconsistent_counts_rejected(self) -> None:
        board = build_system(build_parity(5))
        with pytest.raises(ValueError, match="do not fit"):
            GameState(board, maker=to_mask([0, 1]), to_move=Player.MAKER)
        with pytest.raises(ValueError, match="both Maker and Breaker"):
            GameState(board, maker=1, breaker=1)

    def test_threat_on_parity_seven(self) -> None:
        board = build_system(build_parity(7))
        s = GameState(board).play_many(
            [board.element_id((1, 2)), board.element_id((3, 4)), board.element_id((2, 7))]
        )
        expected = Threat(board.set_id_of(1, 2, 7), board.element_id((7, 1)))
        assert expected in threats(s)

    def test_maker_wins_by_completing_a_set(self) -> None:
        board = build_system(build_parity(3))
        s = GameState(board, maker=to_mask([0, 1, 2]), to_move=Player.BREAKER, breaker_bias=1)
        assert winner_if_terminal(s) is Player.MAKER

    def test_breaker_wins_when_every_set_hit(self) -> None:
        board = build_system(build_parity(3))
        s = GameState(board).play(0).play(1)
        assert winner_if_terminal(s) is Player.BREAKER

    def test_no_sets_is_breaker_win(self) -> None:
        s = GameState(build_system(build_transitive(5)))
        assert winner_if_terminal(s) is Player.BREAKER

    def test_outcome_survives_further_claims(self) -> None:
        rng = np.random.default_rng(31)
        for _ in range(60):
            board = build_system(sample_random(int(rng.integers(4, 9)), 0.5, rng))
            state = GameState(board, breaker_bias=int(rng.integers(1, 3)))
            settled = winner_if_terminal(state)
            for e in rng.permutation(board.n_elements):
                state = state.play(int(e))
                outcome = winner_if_terminal(state)
                if settled is not None:
                    assert outcome is settled
                settled = outcome
            assert settled is not None


# ==================================================================
# TestPairing
# ==================================================================
class TestPairing:
    """Pairing construction and validation."""

    def test_small_pairing_blocks_parity_five(self) -> None:
        board = build_system(build_parity(5))
        pairing = Pairing.from_edges(
            board,
            [((1, 2), (3, 1)), ((2, 3), (4, 2)), ((3, 4), (5, 3)), ((4, 5), (1, 4)), ((5, 1), (2, 5))],
        )
        assert validate_pairing(board, pairing) == (True, "ok")
        assert pairing.partner(board.element_id((1, 2))) == board.element_id((3, 1))

    def test_missing_set_is_reported(self) -> None:
        board = build_system(build_parity(5))
        pairing = Pairing.from_edges(board, [((1, 2), (3, 1))])
        ok, diagnostic = validate_pairing(board, pairing)
        assert not ok
        assert "not blocked" in diagnostic

    def test_played_element_is_reported(self) -> None:
        board = build_system(build_parity(3))
        pairing = Pairing.from_edges(board, [((1, 2), (2, 3))])
        ok, diagnostic = validate_pairing(board, pairing, exclude=[board.element_id((1, 2))])
        assert not ok
        assert "already played" in diagnostic

    def test_overlapping_pairs_raise(self) -> None:
        with pytest.raises(PairingError, match="disjoint"):
            Pairing(pairs=((0, 1), (1, 2)))


# ==================================================================
# TestReplay
# ==================================================================
class TestReplay:
    """Transcripts replay legally and reproducibly."""

    def test_random_games_replay(self) -> None:
        board = build_system(build_parity(7))
        for seed in range(5):
            transcript = _random_game(board, seed)
            result = replay(transcript)
            assert result.ok
            assert result.winner == transcript.winner

    def test_biased_game_replays(self) -> None:
        transcript = _random_game(build_system(build_parity(6)), 3, bias=2)
        assert transcript.bias == (1, 2)
        assert replay(transcript).ok

    def test_reruns_are_byte_identical(self) -> None:
        board = build_system(build_parity(7))
        for seed in range(20):
            assert _random_game(board, seed).to_json() == _random_game(board, seed).to_json()

    def test_tampered_move_reports_ply(self) -> None:
        transcript = _random_game(build_system(build_parity(7)), 1)
        taken = transcript.moves[0].elements[0]
        moves = list(transcript.moves)
        moves[2] = MoveRecord(player=Player.MAKER, elements=[taken])
        result = replay(transcript.model_copy(update={"moves": moves}))
        assert not result.ok
        assert result.offending_ply == 3

    def test_out_of_turn_move(self) -> None:
        transcript = _random_game(build_system(build_parity(5)), 2)
        moves = [transcript.moves[0], transcript.moves[0]]
        result = replay(transcript.model_copy(update={"moves": moves}))
        assert not result.ok
        assert result.offending_ply == 2
        assert "out of turn" in result.message

    def test_wrong_winner_detected(self) -> None:
        transcript = _random_game(build_system(build_parity(5)), 4)
        flipped = transcript.winner.opponent
        result = replay(transcript.model_copy(update={"winner": flipped}))
        assert not result.ok
        assert "recorded winner" in result.message
