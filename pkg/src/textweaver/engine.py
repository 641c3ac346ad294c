"""Game sessions: command execution, scoring and the quest policy tracker.

A session owns the mutable run of one game definition: parse a command,
apply the action, re-render the observation, and keep the winning policy in
step with what the player actually did.  Also the save-file codec.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import kb
from .kb import RuleSet
from .logic import Atom, EntityId, GroundAction, NotApplicable, State, apply_action
from .parser import Command, CommandError, Vocabulary, parse, player_room, resolve
from .questgen import Quest, replay_states
from .rng import RNG_ALGORITHM
from .textgen import NameTable, TextEngine, load_theme

FORMAT_MAJOR = 1
FORMAT_MINOR = 0
SAVE_SUFFIX = ".twg.json"


class VersionMismatch(Exception):
    """Save file written by an incompatible newer format."""


class CorruptFile(Exception):
    """Save file that does not decode to a valid game."""


class EpisodeOver(Exception):
    """Raised when stepping a session whose episode already ended."""


@dataclass
class GameDefinition:
    rules: RuleSet
    initial: State
    quest: Quest
    names: NameTable
    theme: str
    entities: list[EntityId]
    seeds: dict[str, int] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


@dataclass
class StepResult:
    feedback: str
    description: str
    score: int
    intermediate_reward: int
    moves: int
    done: bool
    won: bool
    lost: bool
    admissible_commands: list[str]
    winning_policy: list[str] | None
    objective: str
    full_state: list[str]
    error_kind: str | None = None


class Session:
    """One interactive run of a game."""

    def __init__(self, game: GameDefinition):
        self.game = game
        self.vocab = Vocabulary.from_rules(game.rules)
        grammar = load_theme(game.theme)
        text_seed = game.seeds.get("text", 0)
        self.text = TextEngine(grammar, game.names, text_seed)
        self.transcript: list[dict] = []
        self.reset()

    # -- lifecycle ---------------------------------------------------------

    def reset(self) -> StepResult:
        self.state = self.game.initial
        self.score = 0
        self.moves = 0
        self.won = False
        self.lost = False
        self.policy: list[GroundAction] | None = list(self.game.quest.actions)
        self.transcript.clear()
        welcome = self.game.metadata.get("welcome", "Welcome.")
        feedback = welcome + "\n\n" + self._look()
        result = self._result(feedback, 0)
        self.transcript.append({"input": None, "output": feedback, "moves": 0})
        return result

    @property
    def done(self) -> bool:
        return self.won or self.lost

    @property
    def outcome(self) -> str:
        if self.won:
            return "won"
        if self.lost:
            return "lost"
        if self.policy is None:
            return "unwinnable"
        return "ongoing"

    # -- observation parts ---------------------------------------------------

    def _look(self) -> str:
        return self.text.room_description(player_room(self.state), self.state)

    def admissible(self) -> tuple[GroundAction, ...]:
        return self.game.rules.admissible(self.state)

    def admissible_commands(self) -> list[str]:
        rendered = sorted(self.text.render_command(a) for a in self.admissible())
        return rendered + ["inventory", "look"]

    def winning_policy_commands(self) -> list[str] | None:
        if self.policy is None:
            return None
        return [self.text.render_command(a) for a in self.policy]

    def objective(self) -> str:
        return self.text.objective_text(self.game.quest.actions)

    def _result(
        self, feedback: str, reward: int, error_kind: str | None = None
    ) -> StepResult:
        return StepResult(
            feedback=feedback,
            description=self._look(),
            score=self.score,
            intermediate_reward=reward,
            moves=self.moves,
            done=self.done,
            won=self.won,
            lost=self.lost,
            admissible_commands=self.admissible_commands(),
            winning_policy=self.winning_policy_commands(),
            objective=self.objective(),
            full_state=[a.encode() for a in self.state],
            error_kind=error_kind,
        )

    # -- policy maintenance ---------------------------------------------------

    def _policy_still_works(self, policy: Sequence[GroundAction]) -> bool:
        states = replay_states(self.state, policy)
        if states is None:
            return False
        return states[-1].contains_all(self.game.quest.winning_conditions)

    def _update_policy(self, action: GroundAction) -> int:
        """Track the remaining winning policy; return the step's reward signal.

        Following the policy shortens it (+1).  An irrelevant action leaves
        it working (0).  An undoable detour prepends the reciprocal repair
        (-1).  Anything else makes the game unwinnable (-1, policy dropped).
        """
        if self.policy is None:
            return 0
        if self.policy and action == self.policy[0]:
            self.policy.pop(0)
            return 1
        if self._policy_still_works(self.policy):
            return 0
        repair = self.game.rules.reciprocal_action(action)
        if repair is not None and self._policy_still_works([repair] + self.policy):
            self.policy.insert(0, repair)
            return -1
        self.policy = None
        return -1

    # -- stepping ---------------------------------------------------------

    def step(self, text: str) -> StepResult:
        if self.done:
            raise EpisodeOver("episode finished; reset the session to play again")
        self.moves += 1
        error_kind = None
        try:
            feedback, reward = self._execute(text)
        except CommandError as err:
            feedback, reward = self.text.error_text(err.kind, err.word), 0
            error_kind = err.kind
        if not self.done:
            if self.game.quest.winning_conditions and self.state.contains_all(
                self.game.quest.winning_conditions
            ):
                self.won = True
                self.score += 1
                feedback += "\n\n" + self.text.win_text()
            elif self.game.quest.losing_conditions and self.state.contains_all(
                self.game.quest.losing_conditions
            ):
                self.lost = True
                self.score -= 1
                feedback += "\n\n" + self.text.lose_text()
        result = self._result(feedback, reward, error_kind)
        self.transcript.append(
            {"input": text, "output": feedback, "moves": self.moves, "score": self.score}
        )
        return result

    def _execute(self, text: str) -> tuple[str, int]:
        lowered = text.strip().lower()
        if lowered == "look":
            return self._look(), 0
        if lowered == "inventory":
            return self.text.inventory_text(self.state), 0
        if lowered == "take all":
            return self._take_all()
        cmd = parse(text, self.vocab)
        if cmd.verb in ("look", "inventory"):
            # bare verb forms arrive here when extra words were stripped
            return self._execute(cmd.verb)
        action = resolve(cmd, self.state, self.game.names, self.vocab, self.admissible())
        return self._perform(action)

    def _perform(self, action: GroundAction) -> tuple[str, int]:
        self.state = apply_action(self.state, action)
        reward = self._update_policy(action)
        feedback = self.text.feedback(action, self.state)
        if action.rule.verb == "go":
            feedback += "\n\n" + self._look()
        return feedback, reward

    def _take_all(self) -> tuple[str, int]:
        takes = [a for a in self.admissible() if a.rule.verb == "take"]
        if not takes:
            raise CommandError("not_admissible", "take all")
        parts: list[str] = []
        total = 0
        for action in takes:
            if not self.state.contains_all(action.consumed + action.required):
                continue
            feedback, reward = self._perform(action)
            parts.append(feedback)
            total += reward
        return " ".join(parts), total

    # -- play against the policy (used by tests and tools) -----------------

    def follow_policy_step(self) -> StepResult:
        if not self.policy:
            raise ValueError("no policy to follow")
        return self.step(self.text.render_command(self.policy[0]))


# ---------------------------------------------------------------------------
# Save files
# ---------------------------------------------------------------------------

_ATOM_RE = re.compile(r"^(\w+)\(([^)]*)\)$")


def _encode_quest(quest: Quest) -> dict:
    return {
        "actions": [
            {"rule": a.rule.name, "binding": {k: v.id for k, v in a.binding_items}}
            for a in quest.actions
        ],
        "winning": sorted(a.encode() for a in quest.winning_conditions),
        "losing": sorted(a.encode() for a in quest.losing_conditions),
    }


def game_to_doc(game: GameDefinition) -> dict:
    return {
        "format": {"major": FORMAT_MAJOR, "minor": FORMAT_MINOR},
        "kind": "game",
        "rng": RNG_ALGORITHM,
        "rules": game.rules.encode_listing(),
        "entities": [{"id": e.id, "type": e.type_tag} for e in game.entities],
        "initial": [a.encode() for a in game.initial],
        "quest": _encode_quest(game.quest),
        "names": game.names.encode(),
        "theme": game.theme,
        "seeds": dict(game.seeds),
        "metadata": game.metadata,
    }


def _decode_atom(text: str, entities: Mapping[str, EntityId]) -> Atom:
    m = _ATOM_RE.match(text)
    if not m:
        raise CorruptFile(f"bad atom string: {text!r}")
    name, argstr = m.groups()
    args = []
    for part in argstr.split(",") if argstr else []:
        part = part.strip()
        if part not in entities:
            raise CorruptFile(f"unknown entity {part!r} in atom {text!r}")
        args.append(entities[part])
    try:
        pred = kb.predicate(name, len(args))
    except Exception:
        raise CorruptFile(f"unknown predicate {name}/{len(args)}")
    return Atom(pred, tuple(args))


def game_from_doc(doc: Mapping) -> GameDefinition:
    try:
        fmt = doc["format"]
        major = int(fmt["major"])
    except (KeyError, TypeError, ValueError):
        raise CorruptFile("missing format block")
    if major > FORMAT_MAJOR:
        raise VersionMismatch(f"file format {major} is newer than supported {FORMAT_MAJOR}")
    try:
        rules = RuleSet.from_listing(doc["rules"])
        entities = [EntityId(e["id"], e["type"]) for e in doc["entities"]]
        emap = {e.id: e for e in entities}
        emap.update({c.id: c for c in kb.CONSTANTS.values()})
        initial = State(_decode_atom(t, emap) for t in doc["initial"])
        qd = doc["quest"] or {"actions": [], "winning": [], "losing": []}
        actions = []
        for ad in qd["actions"]:
            rule = rules[ad["rule"]]
            binding = {}
            for param, eid in ad["binding"].items():
                if eid not in emap:
                    raise CorruptFile(f"unknown entity {eid!r} in quest binding")
                binding[param] = emap[eid]
            actions.append(rule.ground(binding))
        quest = Quest(
            tuple(actions),
            frozenset(_decode_atom(t, emap) for t in qd["winning"]),
            frozenset(_decode_atom(t, emap) for t in qd.get("losing", [])),
        )
        names = NameTable.from_doc(doc["names"])
        theme = doc["theme"]
        seeds = {k: int(v) for k, v in doc.get("seeds", {}).items()}
        metadata = dict(doc.get("metadata", {}))
    except CorruptFile:
        raise
    except VersionMismatch:
        raise
    except Exception as exc:
        raise CorruptFile(f"malformed game document: {exc}")
    return GameDefinition(rules, initial, quest, names, theme, entities, seeds, metadata)


def dumps_game(game: GameDefinition) -> str:
    return json.dumps(game_to_doc(game), sort_keys=True, separators=(",", ":")) + "\n"


def loads_game(text: str) -> GameDefinition:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"not JSON: {exc}")
    if not isinstance(doc, dict):
        raise CorruptFile("top level is not an object")
    return game_from_doc(doc)


def save_game(game: GameDefinition, path: str | Path) -> Path:
    path = Path(path)
    if not path.name.endswith(SAVE_SUFFIX):
        path = path.with_name(path.name + SAVE_SUFFIX)
    path.write_text(dumps_game(game))
    return path


def load_game(path: str | Path) -> GameDefinition:
    return loads_game(Path(path).read_text())
