"""Pydantic v2 output schemas for flip-bias and criteria results."""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


# ------------------------------------------------------------------
# Flip plans
# ------------------------------------------------------------------
class FlipPlan(BaseModel):
    """Breaker's pre-game flips on Π(n), phase by phase.

    ``flips`` holds each edge as oriented before it is flipped; ``deltas``
    the triangle reduction of each flip; ``phases`` the flip count of each
    phase 1..n-2.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=3)
    flips: list[tuple[int, int]]
    deltas: list[int]
    phases: list[int]

    @model_validator(mode="after")
    def _check_shape(self) -> FlipPlan:
        if self.n % 2 == 0:
            raise ValueError(f"flip plans are defined for odd n only, got n={self.n}")
        if len(self.flips) != len(self.deltas):
            raise ValueError(
                f"{len(self.flips)} flips but {len(self.deltas)} deltas"
            )
        if sum(self.phases) != len(self.flips):
            raise ValueError(
                f"phase lengths sum to {sum(self.phases)}, expected {len(self.flips)}"
            )
        return self

    @property
    def total(self) -> int:
        return len(self.flips)

    def phase_of(self) -> list[int]:
        """Phase number (1-based) of every flip."""
        return [i for i, m in enumerate(self.phases, start=1) for _ in range(m)]


class FlipLedgerRow(BaseModel):
    """State after one flip of a plan replayed on Π(n)."""

    flip: int
    phase: int
    edge: str
    delta: int
    remaining: int
    remaining_enumerated: int | None = None
    deviances: list[int]


class BlockDecomposition(BaseModel):
    """Reverse flip sequence cut into blocks (k, ..., 1, k, ..., 1)."""

    n: int
    N: int = Field(description="C(n,2), the board size")
    K: int
    r_next: int = Field(description="Extra reverse flips from block K+1")
    x: int
    S: list[int] = Field(description="Cumulative block sums S_0..S_{K+1}")
    L: list[int] = Field(description="Cumulative block lengths L_0..L_{K+1}")
    reverse_prefix: list[int]


class KappaRow(BaseModel):
    """Flip-bias thresholds for one odd n.

    Two fields are written under their published column names.
    """

    n: int
    total_flips: int
    kappa_upper_closed_form: int = Field(serialization_alias="kappa_upper_paper")
    kappa_upper_exact: int
    kappa_lower_exact: int
    kappa_lower_asymptotic: float = Field(serialization_alias="kappa_lower_paper_asymptotic")
    x: int
    K: int

    @computed_field
    @property
    def upper_delta(self) -> int:
        return self.kappa_upper_exact - self.kappa_upper_closed_form


# ------------------------------------------------------------------
# Bias bounds
# ------------------------------------------------------------------
class BiasRow(BaseModel):
    """Closed-form criteria for Π(n) at one Breaker bias b."""

    n: int
    w: int
    board_size: int
    b: int = Field(ge=1)
    lower_bound: float
    upper_bound: float
    bound_kind: str = "asymptotic bound"
    es_guarantee: bool
    beck_guarantee: bool


# ------------------------------------------------------------------
# Validation
# ------------------------------------------------------------------
class ValidationIssue(BaseModel):
    """A single warning or error surfaced by a validator."""

    severity: str = Field(pattern=r"^(warning|error)$")
    dimension: str
    message: str
    threshold: str = ""
