from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import pandas as pd
from colorama import Fore, Style
from pydantic import BaseModel

from src import __version__
from src.transcript import Transcript

TOOL_NAME = "directed-triangle-games"


class ResultWriter:
    """
    The Communicator.

    Responsibility:
    1. Turn result rows (pydantic models or dicts) into one DataFrame.
    2. Emit CSV with a ``# key: value`` header block, or JSON as
       ``{"meta": ..., "rows": [...]}``.
    3. Stamp every file with tool version, argv, seed and budget. No
       timestamps, so identical runs give identical bytes.
    """

    def __init__(
        self,
        argv: Sequence[str],
        seed: int,
        budget: int | None = None,
        fmt: str = "csv",
    ):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown output format '{fmt}' (expected csv or json)")
        self.argv = list(argv)
        self.seed = seed
        self.budget = budget
        self.fmt = fmt

    @property
    def meta(self) -> dict[str, Any]:
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "argv": " ".join(self.argv),
            "seed": self.seed,
            "budget": self.budget,
        }

    @staticmethod
    def to_frame(rows: Iterable[BaseModel | dict[str, Any]]) -> pd.DataFrame:
        records = [
            r.model_dump(mode="json", by_alias=True) if isinstance(r, BaseModel) else r
            for r in rows
        ]
        return pd.DataFrame.from_records(records)

    def render(
        self,
        rows: Iterable[BaseModel | dict[str, Any]],
        extra_meta: dict[str, Any] | None = None,
    ) -> str:
        df = self.to_frame(rows)
        meta = {**self.meta, **(extra_meta or {})}
        if self.fmt == "json":
            payload = {"meta": meta, "rows": json.loads(df.to_json(orient="records"))}
            return json.dumps(payload, indent=2) + "\n"
        header = "".join(f"# {key}: {value}\n" for key, value in meta.items())
        return header + df.to_csv(index=False, lineterminator="\n")

    def write(
        self,
        rows: Iterable[BaseModel | dict[str, Any]],
        out: str | Path | None = None,
        extra_meta: dict[str, Any] | None = None,
    ) -> str:
        """Render and write to ``out``; without a path the text goes to stdout."""
        text = self.render(rows, extra_meta)
        if out is None:
            print(text, end="")
        else:
            Path(out).write_text(text)
            print(f"{Fore.GREEN}[+] Wrote {out}{Style.RESET_ALL}")
        return text


def write_transcript(transcript: Transcript, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(transcript.to_json())
    return path


def read_transcript(path: str | Path) -> Transcript:
    return Transcript.model_validate_json(Path(path).read_text())
