"""Game transcripts and their replay check."""
from __future__ import annotations

from pydantic import BaseModel, Field

from src.hypergraph import GameState, IllegalMoveError, Player, build_system, winner_if_terminal
from src.tournament import Tournament

Line = list[tuple[Player, list[int]]]


class MoveRecord(BaseModel):
    """One turn: the player and the edges it took, in order."""

    player: Player
    elements: list[tuple[int, int]]


class Transcript(BaseModel):
    board: str = Field(description="Tournament file payload")
    bias: tuple[int, int] = (1, 1)
    moves: list[MoveRecord] = Field(default_factory=list)
    winner: Player | None = None
    seed: int | None = None

    @classmethod
    def from_line(
        cls,
        tournament: Tournament,
        line: Line,
        breaker_bias: int = 1,
        seed: int | None = None,
    ) -> Transcript:
        """Build a transcript from element-id turns; the winner is recomputed."""
        board = build_system(tournament)
        state = GameState(board, breaker_bias=breaker_bias)
        moves = []
        for player, elements in line:
            state = state.play_many(elements)
            moves.append(
                MoveRecord(player=player, elements=[tuple(board.edge(e)) for e in elements])
            )
        return cls(
            board=tournament.to_text(),
            bias=(1, breaker_bias),
            moves=moves,
            winner=winner_if_terminal(state),
            seed=seed,
        )

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


class ReplayResult(BaseModel):
    ok: bool
    winner: Player | None = None
    offending_ply: int | None = None
    message: str = ""


def replay(transcript: Transcript) -> ReplayResult:
    """Re-run every turn, checking legality and the recorded winner.

    Plies are numbered from 1 in turn order.
    """
    try:
        tournament = Tournament.from_text(transcript.board)
    except ValueError as exc:
        return ReplayResult(ok=False, message=f"unreadable board: {exc}")
    a, b = transcript.bias
    if a != 1:
        return ReplayResult(ok=False, message=f"Maker bias must be 1, got {a}")
    board = build_system(tournament)
    state = GameState(board, breaker_bias=b)
    for ply, record in enumerate(transcript.moves, start=1):
        if winner_if_terminal(state) is not None:
            return ReplayResult(ok=False, offending_ply=ply, message="move after the game ended")
        if record.player is not state.to_move:
            return ReplayResult(
                ok=False,
                offending_ply=ply,
                message=f"{record.player.value} moved out of turn",
            )
        expected = min(state.bias_of(record.player), state.unclaimed.bit_count())
        if len(record.elements) != expected:
            return ReplayResult(
                ok=False,
                offending_ply=ply,
                message=f"{record.player.value} took {len(record.elements)} elements, expected {expected}",
            )
        try:
            for edge in record.elements:
                state = state.play(board.element_id(edge))
        except (IllegalMoveError, ValueError) as exc:
            return ReplayResult(ok=False, offending_ply=ply, message=str(exc))
    winner = winner_if_terminal(state)
    if winner != transcript.winner:
        recorded = transcript.winner.value if transcript.winner else "none"
        found = winner.value if winner else "none"
        return ReplayResult(
            ok=False,
            winner=winner,
            message=f"recorded winner {recorded} but replay gives {found}",
        )
    return ReplayResult(ok=True, winner=winner)
