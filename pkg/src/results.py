"""Pydantic v2 result schemas returned by the solver, verifier and Monte-Carlo runner."""
from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from src.hypergraph import Player
from src.transcript import MoveRecord, Transcript


class SolveResult(BaseModel):
    """Perfect-play value of one position."""

    status: str = Field(pattern=r"^(solved|unknown)$")
    winner: Player | None = None
    breaker_bias: int = Field(ge=1)
    nodes: int = Field(ge=0)
    budget: int = Field(ge=1)
    line: list[MoveRecord] = Field(default_factory=list)
    transcript: Transcript | None = None

    @model_validator(mode="after")
    def _check_winner(self) -> SolveResult:
        if (self.status == "solved") != (self.winner is not None):
            raise ValueError(f"status '{self.status}' inconsistent with winner {self.winner}")
        return self


class ThresholdResult(BaseModel):
    """Smallest Breaker bias that wins, with the winner found at every bias tried."""

    status: str = Field(pattern=r"^(solved|unknown)$")
    b_star: int | None = None
    winners: dict[int, Player] = Field(default_factory=dict)
    nodes: int = 0
    budget: int = Field(ge=1)


class VerificationResult(BaseModel):
    """Outcome of playing a script against every adversary line."""

    status: str = Field(pattern=r"^(ok|counterexample|unknown)$")
    role: Player
    script: str
    breaker_bias: int = Field(ge=1)
    nodes: int = Field(ge=0)
    budget: int = Field(ge=1)
    counterexample: Transcript | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class MCEstimate(BaseModel):
    """Monte-Carlo proportion with an exact binomial confidence interval."""

    n: int = Field(ge=1)
    p: float = Field(ge=0.0, le=1.0)
    trials: int = Field(ge=1)
    successes: int = Field(ge=0)
    unknowns: int = Field(ge=0, default=0)
    no_copy: int = Field(ge=0, default=0)
    estimate: float
    ci_low: float
    ci_high: float
    master_seed: int

    @property
    def decided(self) -> int:
        return self.trials - self.unknowns - self.no_copy
