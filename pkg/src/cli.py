"""Command-line harness: board files, solving, verification, sweeps and Monte Carlo."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from colorama import Fore, Style
from pydantic import ValidationError

from src import __version__
from src.experiments import (
    count_embeddings,
    expected_copies,
    find_embedding,
    mc_embedding_probability,
    mc_maker_win,
)
from src.hypergraph import GameState, Player, build_system
from src.reporting import ResultWriter, read_transcript, write_transcript
from src.settings import HarnessSettings, load_settings
from src.solver import StrategyVerifier, solve, threshold_bias_exact
from src.strategies import StrategyError, make_script, play_game
from src.tournament import (
    count_triangles_moon,
    count_triangles_networkx,
    enumerate_triangles,
    load_board,
    moon_upper_bound,
)
from src.transcript import MoveRecord, replay
from thresholds.criteria import bias_rows
from thresholds.flip_bias import build_flip_plan, fit_lower_bound_constant, flip_ledger, kappa_sweep
from thresholds.outputs import ValidationIssue
from thresholds.validators import validate, validate_bias, validate_plan

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3

BUDGET_FIELDS = {"solve": "solve_budget", "verify": "verify_budget", "mc": "mc_budget"}


@dataclass
class RunContext:
    args: argparse.Namespace
    settings: HarnessSettings
    writer: ResultWriter

    @property
    def out(self) -> str | None:
        return self.args.out


# ------------------------------------------------------------------
# Helpers
# ------------------------------------------------------------------
def _format_line(records: list[MoveRecord]) -> str:
    tags = {Player.MAKER: "M", Player.BREAKER: "B"}
    return " ".join(
        tags[r.player] + "".join(f"({u},{v})" for u, v in r.elements) for r in records
    )


def _report_issues(issues: list[ValidationIssue]) -> bool:
    """Print issues; True when any of them is an error."""
    for issue in issues:
        colour = Fore.RED if issue.severity == "error" else Fore.YELLOW
        print(f"{colour}[!] {issue.dimension}: {issue.message}{Style.RESET_ALL}")
    return any(issue.severity == "error" for issue in issues)


def _odd_range(lo: int, hi: int) -> range:
    if lo % 2 == 0:
        raise ValueError(f"--n-min must be odd, got {lo}")
    if hi < lo:
        raise ValueError(f"--n-max {hi} is below --n-min {lo}")
    return range(lo, hi + 1, 2)


def _counterexample_path(out: str | None) -> Path:
    if out is None:
        return Path("counterexample.json")
    out_path = Path(out)
    return out_path.with_name(f"{out_path.stem}.counterexample.json")


# ------------------------------------------------------------------
# Subcommands
# ------------------------------------------------------------------
def cmd_gen(ctx: RunContext) -> int:
    text = load_board(ctx.args.board).to_text()
    if ctx.out is None:
        print(text, end="")
    else:
        Path(ctx.out).write_text(text)
        print(f"{Fore.GREEN}[+] Wrote {ctx.out}{Style.RESET_ALL}")
    return EXIT_OK


def cmd_triangles(ctx: RunContext) -> int:
    t = load_board(ctx.args.board)
    found = enumerate_triangles(t)
    if ctx.args.list:
        ctx.writer.write([{"a": a, "b": b, "c": c} for a, b, c in found], ctx.out)
        return EXIT_OK
    row = {
        "board": ctx.args.board,
        "n": t.n,
        "enumerated": len(found),
        "moon": count_triangles_moon(t),
        "networkx": count_triangles_networkx(t),
        "regular_max": moon_upper_bound(t.n),
    }
    ctx.writer.write([row], ctx.out)
    if not row["enumerated"] == row["moon"] == row["networkx"]:
        print(f"{Fore.RED}[!] Triangle counts disagree.{Style.RESET_ALL}")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_solve(ctx: RunContext) -> int:
    args, settings = ctx.args, ctx.settings
    t = load_board(args.board)
    if args.threshold:
        found = threshold_bias_exact(t, budget=settings.solve_budget, jobs=settings.jobs)
        row: dict[str, Any] = {
            "board": args.board,
            "status": found.status,
            "b_star": found.b_star,
            "winners": " ".join(f"{b}:{w.value}" for b, w in found.winners.items()),
            "nodes": found.nodes,
            "budget": found.budget,
        }
        ctx.writer.write([row], ctx.out)
        return EXIT_UNKNOWN if found.status == "unknown" else EXIT_OK

    state = GameState(build_system(t), breaker_bias=args.bias)
    result = solve(
        state,
        budget=settings.solve_budget,
        jobs=settings.jobs,
        use_symmetry=not args.no_symmetry,
        order_seed=args.order_seed,
    )
    row = {
        "board": args.board,
        "bias": args.bias,
        "status": result.status,
        "winner": result.winner.value if result.winner else None,
        "nodes": result.nodes,
        "budget": result.budget,
        "line": _format_line(result.line),
    }
    ctx.writer.write([row], ctx.out)
    if args.transcript and result.transcript is not None:
        write_transcript(result.transcript, args.transcript)
        print(f"{Fore.GREEN}[+] Principal line written to {args.transcript}{Style.RESET_ALL}")
    return EXIT_UNKNOWN if result.status == "unknown" else EXIT_OK


def cmd_verify(ctx: RunContext) -> int:
    args, settings = ctx.args, ctx.settings
    board = build_system(load_board(args.board))
    role = Player.MAKER if args.maker else Player.BREAKER
    script = make_script(
        args.maker or args.breaker,
        board,
        role,
        seed=settings.seed,
        double_threat=args.mutate != "no-double-threat",
    )
    verifier = StrategyVerifier(board, args.bias, settings.verify_budget)
    result = verifier.verify_maker(script) if role is Player.MAKER else verifier.verify_breaker(script)
    row = {
        "board": args.board,
        "role": role.value,
        "script": result.script,
        "bias": args.bias,
        "status": result.status,
        "nodes": result.nodes,
        "budget": result.budget,
    }
    ctx.writer.write([row], ctx.out)
    if result.status == "unknown":
        return EXIT_UNKNOWN
    if result.counterexample is not None:
        path = write_transcript(result.counterexample, _counterexample_path(ctx.out))
        print(f"{Fore.RED}[!] {result.message}; counterexample written to {path}{Style.RESET_ALL}")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_play(ctx: RunContext) -> int:
    args, seed = ctx.args, ctx.settings.seed
    board = build_system(load_board(args.board))
    maker = make_script(args.maker, board, Player.MAKER, seed=seed)
    breaker = make_script(args.breaker, board, Player.BREAKER, seed=seed + 1)
    transcript = play_game(board, maker, breaker, bias=args.bias, seed=seed)
    if ctx.out is None:
        print(transcript.to_json(), end="")
    else:
        write_transcript(transcript, ctx.out)
        print(f"{Fore.GREEN}[+] Wrote {ctx.out}{Style.RESET_ALL}")
    winner = transcript.winner.value if transcript.winner else "none"
    print(f"    > Winner: {winner} after {len(transcript.moves)} turns")
    return EXIT_OK


def cmd_replay(ctx: RunContext) -> int:
    try:
        transcript = read_transcript(ctx.args.transcript)
    except ValidationError as exc:
        print(f"{Fore.RED}[!] Malformed transcript: {exc}{Style.RESET_ALL}")
        return EXIT_FAILURE
    result = replay(transcript)
    if not result.ok:
        where = f" at ply {result.offending_ply}" if result.offending_ply else ""
        print(f"{Fore.RED}[!] Replay failed{where}: {result.message}{Style.RESET_ALL}")
        return EXIT_FAILURE
    winner = result.winner.value if result.winner else "none"
    print(f"{Fore.GREEN}[+] Transcript is legal; winner {winner}.{Style.RESET_ALL}")
    return EXIT_OK


def cmd_flip(ctx: RunContext) -> int:
    plan = build_flip_plan(ctx.args.n)
    failed = _report_issues(validate_plan(plan))
    rows = [row.model_dump() for row in flip_ledger(plan, recount=not ctx.args.no_recount)]
    if ctx.settings.output_format == "csv":
        for row in rows:
            row["deviances"] = " ".join(str(d) for d in row["deviances"])
    ctx.writer.write(rows, ctx.out)
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_kappa(ctx: RunContext) -> int:
    ns = _odd_range(ctx.args.n_min, ctx.args.n_max)
    rows = kappa_sweep(ns)
    failed = False
    for row in rows:
        failed |= _report_issues(validate(row))
    ctx.writer.write(rows, ctx.out, extra_meta={"fit_c": fit_lower_bound_constant(ns)})
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_bias(ctx: RunContext) -> int:
    args = ctx.args
    rows = bias_rows(range(args.n_min, args.n_max + 1), range(args.b_min, args.b_max + 1))
    failed = False
    for row in rows:
        failed |= _report_issues(
            [i for i in validate_bias(row) if i.severity == "error" or row.b == args.b_min]
        )
    ctx.writer.write(rows, ctx.out)
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_embed(ctx: RunContext) -> int:
    t = load_board(ctx.args.board)
    copy = find_embedding(t)
    row = {
        "board": ctx.args.board,
        "n": t.n,
        "found": copy is not None,
        "vertices": " ".join(str(v) for v in copy) if copy else "",
        "copies": count_embeddings(t) if ctx.args.count else None,
    }
    ctx.writer.write([row], ctx.out)
    return EXIT_OK


def cmd_mc(ctx: RunContext) -> int:
    args, settings = ctx.args, ctx.settings
    if args.mode == "maker":
        estimate = mc_maker_win(
            args.n,
            args.p,
            args.trials,
            settings.seed,
            budget=settings.mc_budget,
            jobs=settings.jobs,
            confidence=settings.confidence_level,
        )
    else:
        estimate = mc_embedding_probability(
            args.n,
            args.p,
            args.trials,
            settings.seed,
            jobs=settings.jobs,
            confidence=settings.confidence_level,
        )
    extra = {"mode": args.mode, "confidence_level": settings.confidence_level}
    if 0.0 < args.p < 1.0:
        extra["expected_copies"] = expected_copies(args.n, args.p)
    row = {**estimate.model_dump(), "decided": estimate.decided}
    ctx.writer.write([row], ctx.out, extra_meta=extra)
    return EXIT_UNKNOWN if args.mode == "maker" and estimate.decided == 0 else EXIT_OK


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed (default from config)")
    common.add_argument("--budget", type=int, default=None, help="Node budget for solve/verify/mc")
    common.add_argument("--out", default=None, help="Result file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="Result file format")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes")
    common.add_argument("--config", default=None, help="Alternative YAML settings file")

    board = argparse.ArgumentParser(add_help=False)
    board.add_argument(
        "--board",
        required=True,
        help="parity:n, transitive:n, random:n:p:seed or file:path",
    )

    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Maker-Breaker directed-triangle games on tournaments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, handler: Callable[[RunContext], int], help_text: str, *parents):
        p = sub.add_parser(name, parents=[common, *parents], help=help_text)
        p.set_defaults(handler=handler)
        return p

    add("gen", cmd_gen, "Emit a tournament file", board)

    p = add("triangles", cmd_triangles, "Count or list directed triangles", board)
    p.add_argument("--list", action="store_true", help="Emit every triangle instead of counts")

    p = add("solve", cmd_solve, "Solve a board exactly", board)
    p.add_argument("--bias", type=int, default=1, help="Breaker bias b")
    p.add_argument("--threshold", action="store_true", help="Search the least winning Breaker bias")
    p.add_argument("--transcript", default=None, help="Write the principal line here")
    p.add_argument("--no-symmetry", action="store_true", help="Disable rotation canonicalisation")
    p.add_argument("--order-seed", type=int, default=None, help="Shuffle move ordering")

    p = add("verify", cmd_verify, "Check a scripted strategy against every opponent line", board)
    side = p.add_mutually_exclusive_group(required=True)
    side.add_argument("--maker", default=None, help="Maker script name")
    side.add_argument("--breaker", default=None, help="Breaker script name")
    p.add_argument("--bias", type=int, default=1, help="Breaker bias b")
    p.add_argument("--mutate", choices=["no-double-threat"], default=None)

    p = add("play", cmd_play, "Play one scripted game and emit its transcript", board)
    p.add_argument("--maker", required=True, help="Maker script name or 'random'")
    p.add_argument("--breaker", required=True, help="Breaker script name or 'random'")
    p.add_argument("--bias", type=int, default=1, help="Breaker bias b")

    p = add("replay", cmd_replay, "Validate a transcript")
    p.add_argument("transcript", help="Transcript JSON file")

    p = add("flip", cmd_flip, "Flip plan ledger on Π(n)")
    p.add_argument("--n", type=int, required=True, help="Odd board size")
    p.add_argument("--no-recount", action="store_true", help="Skip per-flip enumeration")

    p = add("kappa", cmd_kappa, "Flip-bias threshold sweep over odd n")
    p.add_argument("--n-min", type=int, default=7)
    p.add_argument("--n-max", type=int, default=41)

    p = add("bias", cmd_bias, "Bias criteria table")
    p.add_argument("--n-min", type=int, default=7)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--b-min", type=int, default=1)
    p.add_argument("--b-max", type=int, default=4)

    p = add("embed", cmd_embed, "Find an order-preserving Π(7) copy", board)
    p.add_argument("--count", action="store_true", help="Also count every copy")

    p = add("mc", cmd_mc, "Monte-Carlo runs on random tournaments")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--mode", choices=["embedding", "maker"], default="embedding")

    return parser


def _settings_for(args: argparse.Namespace) -> HarnessSettings:
    overrides: dict[str, Any] = {
        "seed": args.seed,
        "jobs": args.jobs,
        "output_format": args.format,
    }
    if args.command in BUDGET_FIELDS:
        overrides[BUDGET_FIELDS[args.command]] = args.budget
    return load_settings(args.config).with_overrides(**overrides)


def run(argv: Sequence[str]) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        settings = _settings_for(args)
        budget_field = BUDGET_FIELDS.get(args.command)
        writer = ResultWriter(
            argv,
            seed=settings.seed,
            budget=getattr(settings, budget_field) if budget_field else None,
            fmt=settings.output_format,
        )
        return args.handler(RunContext(args=args, settings=settings, writer=writer))
    except StrategyError as exc:
        print(f"{Fore.RED}[!] Strategy failed: {exc}{Style.RESET_ALL}")
        return EXIT_FAILURE
    except (ValueError, TypeError, FileNotFoundError) as exc:
        print(f"{Fore.RED}[!] {exc}{Style.RESET_ALL}")
        parser.print_usage()
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))
