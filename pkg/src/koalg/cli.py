"""Command-line interface: ``koalg <command> [game] [options]``.

Exit status is 0 on success, 1 on domain errors (reported on stderr as a
single line starting with ``error:``) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import catalog, jsonout
from .choice import Kind
from .equilibrium import nash_check, profile_outcome, subgame_perfect_check
from .errors import KoalgError
from .game import Game, close, rollout
from .matrix import build_matrix_game, parse_matrix_spec
from .outcome import depth_for, evaluate, evaluate_ndet, game_outcome_spec
from .strategies import NAMES as STRATEGY_NAMES
from .strategies import builtin_strategy
from .tree import tree_stats, tree_to_dot, tree_to_json, tree_to_text, unfold
from .values import show, to_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed_default() -> int:
    raw = os.environ.get("KOALG_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"KOALG_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="koalg", description="Simulate and analyse games as coalgebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def game_command(name, help_text, formats=("json", "text")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("game", nargs="?", help=f"catalog game: {', '.join(catalog.GAMES)}")
        p.add_argument("--spec", metavar="FILE", help="matrix game description (JSON)")
        p.add_argument("--strategy", action="append", default=[], metavar="P=NAME",
                       help="assign a named strategy to player P (repeatable)")
        p.add_argument("--lambda", dest="discount", type=float, help="discount factor in (0, 1)")
        p.add_argument("--k", type=float, help="monitoring: P(G) when both play c")
        p.add_argument("--m", type=float, help="monitoring: P(G) when exactly one plays c")
        p.add_argument("--n", type=float, help="monitoring: P(G) when both play d")
        p.add_argument("--nodes", type=int, help="network: number of players")
        p.add_argument("--seed", type=int, default=None, help="random seed (default $KOALG_SEED or 0)")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
        return p

    run = game_command("run", "simulate a closed game turn by turn")
    run.add_argument("--turns", type=int, default=10)
    run.add_argument("--ndet", choices=("first", "random", "error"), default="error",
                     help="how to resolve non-deterministic steps")

    tree = game_command("tree", "unfold the game tree", formats=("json", "dot", "text"))
    tree.add_argument("--depth", type=int, default=2)

    outcome = game_command("outcome", "evaluate the discounted outcome of a profile")
    outcome.add_argument("--eps", type=float, default=1e-6)
    outcome.add_argument("--depth", type=int, help="fixed depth instead of --eps")

    for name, help_text in (("nash", "check a Nash equilibrium over candidate strategies"),
                            ("spc", "check subgame perfection up to a horizon")):
        p = game_command(name, help_text)
        p.add_argument("--eps", type=float, default=1e-6)
        p.add_argument("--candidates", metavar="NAMES",
                       help="comma-separated candidate strategy names (default: the game's list)")
        if name == "spc":
            p.add_argument("--nmax", type=int, default=1)

    lst = sub.add_parser("list", help="list catalog games and strategies")
    lst.add_argument("--format", choices=("json", "text"), default="text")
    lst.add_argument("--out", metavar="FILE")
    return parser


def load_game(args) -> Game:
    if args.spec and args.game:
        raise UsageError("give either a catalog game or --spec, not both")
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise KoalgError(f"cannot read {args.spec}: {exc.strerror}") from None
        game = build_matrix_game(parse_matrix_spec(text))
        if args.discount is not None:
            import dataclasses
            game = dataclasses.replace(game, discount=args.discount)
        return game
    if not args.game:
        raise UsageError("a game is required (catalog name or --spec FILE)")
    if args.game not in catalog.GAMES:
        raise UsageError(f"unknown game {args.game!r}; choose from {', '.join(catalog.GAMES)}")
    return catalog.build_game(args.game, args.discount, args.k, args.m, args.n, args.nodes)


def parse_profile(game: Game, assignments) -> dict:
    profile = {}
    for item in assignments:
        player, sep, name = item.partition("=")
        if not sep or not player or not name:
            raise UsageError(f"--strategy expects P=NAME, got {item!r}")
        try:
            idx = game.index(player)
        except KeyError as exc:
            raise KoalgError(str(exc.args[0])) from None
        key = game.players[idx]
        if key in profile:
            raise UsageError(f"player {player} has two strategies")
        profile[key] = builtin_strategy(name, game, key)
    return profile


def _candidates(game: Game, args) -> dict:
    names = None if args.candidates is None else [c for c in args.candidates.split(",") if c]
    return catalog.default_candidates(game, names)


def _turn_json(r) -> dict:
    if r.finished:
        return {"turn": r.turn, "result": to_json(r.result)}
    return {"turn": r.turn, "output": to_json(r.output)}


def cmd_run(game, args, seed) -> str:
    closed, initial = close(game, parse_profile(game, args.strategy))
    trace = rollout(closed, initial, args.turns, seed, args.ndet)
    if args.format == "json":
        return jsonout.dumps({"game": game.name, "seed": seed,
                              "turns": [_turn_json(r) for r in trace]}) + "\n"
    lines = []
    for r in trace:
        lines.append(f"{r.turn}: result {show(r.result)}" if r.finished
                     else f"{r.turn}: output {show(r.output)}")
    return "\n".join(lines) + "\n"


def cmd_tree(game, args, seed) -> str:
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    if args.strategy:
        closed, initial = close(game, parse_profile(game, args.strategy))
        t = unfold(closed, initial, args.depth)
    else:
        t = unfold(game.core, game.initial_state, args.depth)
    match args.format:
        case "dot":
            return tree_to_dot(t)
        case "text":
            return tree_to_text(t)
    out = tree_to_json(t)
    out["stats"] = tree_stats(t)
    return jsonout.dumps(out) + "\n"


def cmd_outcome(game, args, seed) -> str:
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    closed, initial = close(game, parse_profile(game, args.strategy))
    spec = game_outcome_spec(game, args.discount)
    depth = depth_for(spec, args.eps) if args.depth is None else args.depth
    t = unfold(closed, initial, depth)
    if t.kind is Kind.NDET:
        results = evaluate_ndet(t, spec)
        payload = {"kind": "ndet", "depth": depth, "outcomes": [r.to_json() for r in results]}
        text = "\n".join(f"{show(r.value)} ± {r.error_bound:.3g}" for r in results)
    else:
        r = evaluate(t, spec)
        payload = dict(r.to_json(), depth=depth, kind=t.kind.value)
        text = f"{show(r.value)} ± {r.error_bound:.3g}"
    if args.format == "json":
        return jsonout.dumps(payload) + "\n"
    return text + "\n"


def _verdict_text(v) -> str:
    line = f"{v.kind}: {v.holds}"
    if v.outcome is not None:
        line += f", outcome {show(tuple(v.outcome))}"
    if v.witness is not None:
        line += f"\nwitness: {v.witness}"
    return line + "\n"


def cmd_nash(game, args, seed) -> str:
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    v = nash_check(game, parse_profile(game, args.strategy), _candidates(game, args), args.eps,
                   args.discount)
    return jsonout.dumps(v.to_json()) + "\n" if args.format == "json" else _verdict_text(v)


def cmd_spc(game, args, seed) -> str:
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    v = subgame_perfect_check(game, parse_profile(game, args.strategy), _candidates(game, args),
                              args.nmax, args.eps, args.discount)
    return jsonout.dumps(v.to_json()) + "\n" if args.format == "json" else _verdict_text(v)


def cmd_list(args) -> str:
    if args.format == "json":
        return jsonout.dumps({"games": list(catalog.GAMES), "strategies": list(STRATEGY_NAMES)}) + "\n"
    return ("games: " + ", ".join(catalog.GAMES) + "\n"
            + "strategies: " + ", ".join(STRATEGY_NAMES) + "\n")


COMMANDS = {"run": cmd_run, "tree": cmd_tree, "outcome": cmd_outcome, "nash": cmd_nash,
            "spc": cmd_spc}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "list":
            text = cmd_list(args)
        else:
            seed = _seed_default() if args.seed is None else args.seed
            text = COMMANDS[args.command](load_game(args), args, seed)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (KoalgError, RecursionError) as exc:
        print(f"error: {' '.join(str(exc).split())}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
