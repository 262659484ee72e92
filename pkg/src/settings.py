"""Harness configuration loaded from ``templates/defaults.yaml``."""
from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field

DEFAULTS_PATH = Path(__file__).parent / "templates" / "defaults.yaml"


class HarnessSettings(BaseModel):
    """Seed, node budgets and output options shared by every subcommand."""

    seed: int = Field(ge=0)
    solve_budget: int = Field(ge=1)
    verify_budget: int = Field(ge=1)
    mc_budget: int = Field(ge=1)
    jobs: int = Field(ge=1, default=1)
    output_format: str = Field(pattern=r"^(csv|json)$", default="csv")
    confidence_level: float = Field(gt=0.0, lt=1.0, default=0.95)

    def with_overrides(self, **overrides: Any) -> HarnessSettings:
        """Copy with every non-None override applied and re-validated."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        return HarnessSettings.model_validate({**self.model_dump(), **updates})


def load_settings(path: str | Path | None = None) -> HarnessSettings:
    """Read a YAML config; missing keys fall back to the bundled defaults."""
    with open(DEFAULTS_PATH, "r") as fh:
        raw = yaml.safe_load(fh)
    if path is not None:
        with open(path, "r") as fh:
            custom = yaml.safe_load(fh) or {}
        if not isinstance(custom, dict):
            raise ValueError(f"config {path} must be a YAML mapping")
        budgets = {**raw.get("budgets", {}), **custom.pop("budgets", {})}
        raw = {**raw, **custom, "budgets": budgets}

    budgets = raw.pop("budgets", {})
    return HarnessSettings(
        seed=raw.get("seed", 0),
        solve_budget=budgets.get("solve", 500_000_000),
        verify_budget=budgets.get("verify", 1_000_000_000),
        mc_budget=budgets.get("mc", 10_000_000),
        jobs=raw.get("jobs", 1),
        output_format=raw.get("output_format", "csv"),
        confidence_level=raw.get("confidence_level", 0.95),
    )
