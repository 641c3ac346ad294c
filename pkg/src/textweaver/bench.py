"""Graded benchmark games and baseline agents.

Thirty difficulty levels in three bands.  Each game hides one food target;
the quest is the backward-synthesized path to it, and picking up the
look-alike distractor ends the episode as a loss.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from . import kb
from .engine import GameDefinition
from .env import Env, EnvConfig
from .kb import builtin_rules
from .logic import Atom, EntityId, State
from .questgen import ChainConfig, NoQuestFound, Quest, backward_quest, quest_is_valid
from .rng import derive_seed, stream
from .textgen import TextEngine, assign_names, load_theme
from .worldgen import GenerationFailed, WorldSpec, build_world

MAX_LEVEL = 30
EVAL_STEP_BUDGET = 1000

_BANDS = (
    # (first level, rooms, grid, doors, quest length at band start, at band end)
    (1, 5, 5, False, 1, 5),
    (11, 10, 6, False, 2, 10),
    (21, 20, 7, True, 3, 20),
)

_EASY_WEIGHTS = {"go/free": 3.0, "take/r": 1.0}
_MEDIUM_WEIGHTS = {
    "go/free": 4.0,
    "take/r": 1.0,
    "open/c": 1.5,
    "take/c": 1.5,
    "take/s": 1.0,
    "put": 0.5,
    "insert": 0.5,
    "drop": 0.5,
    "unlock/c": 0.75,
    "lock/c": 0.25,
}
_HARD_WEIGHTS = {
    **_MEDIUM_WEIGHTS,
    "go/door": 4.0,
    "open/d": 2.0,
    "unlock/d": 1.0,
    "close/d": 0.25,
    "close/c": 0.25,
}


def difficulty(level: int) -> dict:
    """World and quest parameters for a benchmark level."""
    if not 1 <= level <= MAX_LEVEL:
        raise ValueError(f"level must be 1..{MAX_LEVEL}, got {level}")
    for start, rooms, grid, doors, ql_lo, ql_hi in reversed(_BANDS):
        if level >= start:
            quest_length = round(ql_lo + (level - start) * (ql_hi - ql_lo) / 9)
            if doors:
                weights = _HARD_WEIGHTS
            elif start > 1:
                weights = _MEDIUM_WEIGHTS
            else:
                weights = _EASY_WEIGHTS
            return {
                "level": level,
                "nb_rooms": rooms,
                "grid_size": grid,
                "with_doors": doors,
                "quest_length": quest_length,
                "rule_weights": dict(weights),
            }
    raise AssertionError("unreachable")


def _reachable_without_unlocking(initial: State, start: EntityId) -> list[EntityId]:
    """Rooms the player can reach when locked doors stay locked."""
    seen = {start.id: start}
    frontier = [start]
    while frontier:
        room = frontier.pop()
        for atom in initial.by_predicate("exit"):
            if atom.args[0] != room:
                continue
            if atom.predicate.arity == 4 and Atom(kb.LOCKED, (atom.args[3],)) in initial:
                continue
            dest = atom.args[2]
            if dest.id not in seen:
                seen[dest.id] = dest
                frontier.append(dest)
    return [seen[k] for k in sorted(seen)]


def _fresh_food_id(taken: set[str]) -> EntityId:
    n = 0
    while f"f_{n}" in taken:
        n += 1
    return EntityId(f"f_{n}", "f")


def make_treasure_hunter(level: int, seed: int = 0, theme: str = "house") -> GameDefinition:
    """A go-find-it game whose solution length grows with the level."""
    params = difficulty(level)
    rules = builtin_rules()
    text_seed = derive_seed(seed, "text")
    last_error: Exception | None = None
    for attempt in range(20):
        world_seed = derive_seed(seed, "world", attempt)
        quest_seed = derive_seed(seed, "quest", attempt)
        spec = WorldSpec(
            nb_rooms=params["nb_rooms"],
            grid_size=params["grid_size"],
            with_doors=params["with_doors"],
            nb_objects=0,
            seed=world_seed,
        )
        world = build_world(spec)
        start_room = world.graph.rooms[0]
        used = {e.id for e in world.entities}
        target = _fresh_food_id(used)
        used.add(target.id)
        seeded = State(tuple(world.initial.atoms) + (Atom(kb.AT, (target, start_room)),))
        try:
            res = backward_quest(
                seeded,
                rules,
                ChainConfig(
                    quest_length=params["quest_length"],
                    direction="backward",
                    seed=quest_seed,
                    max_search_breadth=20_000,
                ),
                rng=stream(quest_seed, "chain"),
                final_rules=["take/r"],
                rule_weights=params["rule_weights"],
            )
        except NoQuestFound as exc:
            last_error = exc
            continue
        used |= {e.id for e in res.created}
        distractor = _fresh_food_id(used)
        rng = stream(seed, "distractor", attempt)
        player_start = next(
            a.args[1] for a in res.initial.by_predicate("at") if a.args[0] == kb.PLAYER
        )
        room = rng.choice(_reachable_without_unlocking(res.initial, player_start))
        initial = State(tuple(res.initial.atoms) + (Atom(kb.AT, (distractor, room)),))
        quest = Quest(
            res.quest.actions,
            res.quest.winning_conditions,
            frozenset({Atom(kb.IN, (distractor, kb.INVENTORY))}),
        )
        if not quest_is_valid(initial, quest):
            last_error = GenerationFailed("distractor broke the quest replay")
            continue
        entities = list(world.entities) + [target] + res.created + [distractor]
        grammar = load_theme(theme)
        names = assign_names(entities, initial, grammar, text_seed)
        text = TextEngine(grammar, names, text_seed)
        metadata = {
            "benchmark_level": level,
            "target": target.id,
            "distractor": distractor.id,
            "welcome": text.hint_text(target.id),
            "rooms_xy": {r.id: list(world.graph.coords[r.id]) for r in world.graph.rooms},
            "quest_length": params["quest_length"],
        }
        return GameDefinition(
            rules=rules,
            initial=initial,
            quest=quest,
            names=names,
            theme=theme,
            entities=entities,
            seeds={
                "master": seed,
                "world": world_seed,
                "quest": quest_seed,
                "text": text_seed,
            },
            metadata=metadata,
        )
    raise GenerationFailed(f"level {level} seed {seed}: {last_error}")


# ---------------------------------------------------------------------------
# Baseline agents
# ---------------------------------------------------------------------------

class SimpleAgent:
    """Types one of eleven fixed commands uniformly at random."""

    VOCABULARY = (
        "north",
        "south",
        "east",
        "west",
        "up",
        "down",
        "look",
        "inventory",
        "take all",
        "drop",
        "YES",
    )

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def act(self, obs) -> str:
        return self.rng.choice(self.VOCABULARY)


class RandomChoiceAgent:
    """Picks an index uniformly from the admissible command list."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def act(self, obs) -> int:
        commands = obs.admissible_commands or []
        if not commands:
            return 0
        return self.rng.randrange(len(commands))


REPORT_SCHEMA_VERSION = 1


@dataclass
class EvalResult:
    """One-life aggregate over a list of games: +1 won, -1 lost, 0 on budget."""

    games: int
    wins: int
    losses: int
    timeouts: int
    avg_score: float
    avg_steps: float
    records: list[dict] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "games": self.games,
            "wins": self.wins,
            "losses": self.losses,
            "timeouts": self.timeouts,
            "avg_score": self.avg_score,
            "avg_steps": self.avg_steps,
            "records": self.records,
        }


def evaluate(
    agent,
    games: Sequence[GameDefinition],
    max_steps: int = EVAL_STEP_BUDGET,
    config: EnvConfig | None = None,
) -> EvalResult:
    """Play each game once until won, lost, or the step budget runs out."""
    if not games:
        raise ValueError("need at least one game")
    wins = losses = timeouts = 0
    records: list[dict] = []
    for game in games:
        env = Env(game, config or EnvConfig())
        obs = env.reset()
        done = False
        moves = 0
        while not done and moves < max_steps:
            move = agent.act(obs)
            if isinstance(move, int):
                obs, _, done = env.step_choice(move)
            else:
                obs, _, done = env.step(move)
            moves += 1
        if obs.won:
            wins += 1
            outcome = "won"
        elif obs.lost:
            losses += 1
            outcome = "lost"
        else:
            timeouts += 1
            outcome = "expired"
        records.append(
            {
                "seed": game.seeds.get("master"),
                "outcome": outcome,
                "steps": moves,
                "score": obs.score,
            }
        )
    return EvalResult(
        games=len(games),
        wins=wins,
        losses=losses,
        timeouts=timeouts,
        avg_score=sum(r["score"] for r in records) / len(records),
        avg_steps=sum(r["steps"] for r in records) / len(records),
        records=records,
    )
