"""The `tw` command line: make, play, inspect, eval, bench, serve."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import (
    EVAL_STEP_BUDGET,
    RandomChoiceAgent,
    SimpleAgent,
    difficulty,
    evaluate,
    make_treasure_hunter,
)
from .engine import CorruptFile, Session, VersionMismatch, load_game, save_game
from .env import EnvConfig, UnsupportedFormat
from .gamegen import PRESETS, make_game
from .logic import enumerate_reachable
from .questgen import NoQuestFound
from .textgen import available_themes
from .worldgen import GenerationFailed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3

_USER_ERRORS = (
    ValueError,
    KeyError,
    NoQuestFound,
    GenerationFailed,
    VersionMismatch,
    CorruptFile,
    UnsupportedFormat,
    OSError,
)


def _default_seed() -> int:
    raw = os.environ.get("TW_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _load(path: str):
    if path in PRESETS:
        return PRESETS[path]()
    return load_game(path)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_make(args) -> int:
    if args.preset:
        game = PRESETS[args.preset]()
    else:
        game = make_game(
            seed=args.seed,
            nb_rooms=args.rooms,
            nb_objects=args.objects,
            quest_length=args.quest_length,
            theme=args.theme,
            with_doors=args.doors,
            direction=args.direction,
        )
    path = save_game(game, args.out)
    print(f"wrote {path}")
    session = Session(game)
    session.reset()
    print(f"objective: {session.objective()}")
    print(f"seeds: {json.dumps(game.seeds, sort_keys=True)}")
    if args.solution:
        for command in session.winning_policy_commands() or []:
            print(f"  {command}")
    return EXIT_OK


def cmd_play(args) -> int:
    game = _load(args.game)
    session = Session(game)
    result = session.reset()
    print(result.feedback)
    steps = 0
    while not session.done:
        if args.max_steps and steps >= args.max_steps:
            print(f"\nStep budget of {args.max_steps} reached. "
                  f"Score: {session.score}. Moves: {session.moves}.")
            return EXIT_OK
        commands = session.admissible_commands()
        if args.choices:
            print()
            for i, command in enumerate(commands):
                print(f"  [{i}] {command}")
        try:
            raw = input("\n> ").strip()
        except EOFError:
            print()
            return EXIT_OK
        if not raw and args.choices:
            continue
        if raw.lower() in ("quit", "exit"):
            return EXIT_OK
        if args.choices and raw.isdigit() and int(raw) < len(commands):
            raw = commands[int(raw)]
        result = session.step(raw)
        print(f"\n{result.feedback}")
        steps += 1
    print(f"\nScore: {session.score}. Moves: {session.moves}. "
          f"Outcome: {session.outcome}.")
    return EXIT_OK


def cmd_inspect(args) -> int:
    game = _load(args.game)
    print(f"theme: {game.theme}")
    print(f"seeds: {json.dumps(game.seeds, sort_keys=True)}")
    rooms = [e for e in game.entities if e.type_tag == "r"]
    print(f"rooms: {len(rooms)}")
    coords = game.metadata.get("rooms_xy", {})
    for room in rooms:
        name = game.names[room.id].display if room.id in game.names else room.id
        where = f" at {tuple(coords[room.id])}" if room.id in coords else ""
        print(f"  {room.id} ({name}){where}")
    print("atoms:")
    for line in game.initial.encode().splitlines():
        print(f"  {line}")
    if not game.quest.actions:
        print("quest: no quest")
    else:
        print("quest:")
        session = Session(game)
        session.reset()
        for action, command in zip(game.quest.actions, session.winning_policy_commands()):
            print(f"  {action.encode():<32} {command}")
        print(f"winning: {sorted(a.encode() for a in game.quest.winning_conditions)}")
        if game.quest.losing_conditions:
            print(f"losing: {sorted(a.encode() for a in game.quest.losing_conditions)}")
    graph = enumerate_reachable(
        game.initial, game.rules, game.rules.types, state_limit=args.state_limit
    )
    suffix = "+" if graph.truncated else ""
    print(f"reachable states: {len(graph.states)}{suffix}")
    return EXIT_OK


def _make_agent(kind: str, seed: int):
    if kind == "random":
        return RandomChoiceAgent(seed), EnvConfig(mode="choice")
    return SimpleAgent(seed), EnvConfig()


def _emit_report(doc: dict, out: str | None) -> None:
    blob = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(blob)
        print(f"wrote {out}")
    summary = {k: doc[k] for k in ("games", "wins", "losses", "timeouts",
                                   "avg_score", "avg_steps")}
    print(json.dumps(summary, sort_keys=True))


def cmd_eval(args) -> int:
    game = _load(args.game)
    agent, config = _make_agent(args.agent, args.seed)
    res = evaluate(agent, [game] * args.episodes, max_steps=args.max_steps,
                   config=config)
    doc = res.to_doc()
    doc.update({"game": args.game, "agent": args.agent, "seed": args.seed})
    _emit_report(doc, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.suite != "th":
        raise ValueError(f"unknown suite {args.suite!r}")
    difficulty(args.level)  # validates early
    games = [
        make_treasure_hunter(args.level, seed=args.seed + i)
        for i in range(args.games)
    ]
    agent, config = _make_agent(args.agent, args.seed)
    res = evaluate(agent, games, max_steps=args.max_steps, config=config)
    doc = res.to_doc()
    doc.update(
        {"suite": "th", "level": args.level, "agent": args.agent, "seed": args.seed}
    )
    _emit_report(doc, args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    app = build_app(debug=args.debug)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits with 2 on usage errors; route through our own codes
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    top = _Parser(prog="tw", description=__doc__)
    sub = top.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("make", parents=[], help="generate a game file",
                       add_help=True)
    p.add_argument("--rooms", type=int, default=5)
    p.add_argument("--objects", type=int, default=8)
    p.add_argument("--quest-length", type=int, default=3)
    p.add_argument("--theme", choices=available_themes(), default="house")
    p.add_argument("--direction", choices=["forward", "backward"], default="forward")
    p.add_argument("--doors", action="store_true")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", default="game.twg.json")
    p.add_argument("--solution", action="store_true",
                   help="print the winning commands")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("play", help="play a game in the terminal")
    p.add_argument("game", help="game file or preset name")
    p.add_argument("--choices", action="store_true",
                   help="list numbered admissible commands")
    p.add_argument("--max-steps", type=int, default=0)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("inspect", help="print the contents of a game file")
    p.add_argument("game")
    p.add_argument("--state-limit", type=int, default=2000)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("eval", help="run an agent against one game file")
    p.add_argument("--game", required=True)
    p.add_argument("--agent", choices=["random", "simple"], default="random")
    p.add_argument("--episodes", type=int, default=10)
    p.add_argument("--max-steps", type=int, default=EVAL_STEP_BUDGET)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("suite", choices=["th"])
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--agent", choices=["random", "simple"], default="random")
    p.add_argument("--max-steps", type=int, default=EVAL_STEP_BUDGET)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--debug", action="store_true",
                   help="allow full-state observability for all sessions")
    p.set_defaults(func=cmd_serve)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"tw: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:  # --help and friends
        return EXIT_OK if err.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except _USER_ERRORS as err:
        print(f"tw: {err}", file=sys.stderr)
        return EXIT_INVALID
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as err:  # noqa: BLE001 - last-resort diagnostic
        print(f"tw: internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
