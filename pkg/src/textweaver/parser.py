"""Player command parsing and grounding against the current state.

Two stages: ``parse`` splits raw text into verb and noun phrases using only
the vocabulary, then ``resolve`` grounds the phrases against what the player
can currently see and the admissible actions.  Resolution guarantees the
round trip: rendering any admissible action to text and resolving it yields
the same action back.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import kb
from .logic import EntityId, GroundAction, State
from .textgen import NameTable

DETERMINERS = frozenset({"a", "an", "the", "some"})
MARKERS = frozenset({"from", "with", "on", "in", "into"})
GENERIC_PORTABLE = frozenset({"thing", "object", "item"})
MAX_WORDS = 8
INFORMATIONAL = frozenset({"look", "inventory"})


class CommandError(Exception):
    """A player command that cannot be executed.

    ``kind`` is one of: empty, unknown_verb, unknown_noun, ambiguous,
    not_admissible, too_long - matching the err_* text productions.
    """

    def __init__(self, kind: str, word: str = ""):
        super().__init__(f"{kind}: {word}" if word else kind)
        self.kind = kind
        self.word = word


@dataclass(frozen=True)
class Command:
    verb: str
    np1: tuple[str, ...] = ()
    np2: tuple[str, ...] = ()
    marker: str | None = None


@dataclass
class Vocabulary:
    """Verb words and their rule verbs; built once per rule set."""

    verbs: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_rules(cls, rules: Iterable) -> "Vocabulary":
        verbs: dict[str, set[str]] = {}
        for rule in rules:
            verbs.setdefault(rule.verb, set()).add(rule.verb)
        # "put x in/into y" is the insert rule behind the put verb word
        if "insert" in verbs:
            verbs.setdefault("put", set()).add("insert")
        return cls({w: tuple(sorted(v)) for w, v in verbs.items()})

    def known_verb(self, word: str) -> bool:
        return word in self.verbs or word in INFORMATIONAL


def parse(text: str, vocab: Vocabulary) -> Command:
    """Split raw input into verb and up to two noun phrases."""
    words = text.strip().lower().split()
    if not words:
        raise CommandError("empty")
    if len(words) > MAX_WORDS:
        raise CommandError("too_long")
    words = [w for w in words if w not in DETERMINERS]
    if not words:
        raise CommandError("empty")
    head, rest = words[0], words[1:]
    if head in kb.DIRECTIONS:
        if rest:
            raise CommandError("unknown_verb", head)
        return Command("go", (head,))
    if not vocab.known_verb(head):
        raise CommandError("unknown_verb", head)
    marker = None
    np1: list[str] = []
    np2: list[str] = []
    bucket = np1
    for w in rest:
        if w in MARKERS and marker is None and bucket is np1 and np1:
            marker = w
            bucket = np2
            continue
        bucket.append(w)
    if marker is not None and not np2:
        raise CommandError("unknown_noun", marker)
    return Command(head, tuple(np1), tuple(np2), marker)


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

def player_room(state: State) -> EntityId:
    for atom in state.by_predicate("at"):
        if atom.args[0] == kb.PLAYER:
            return atom.args[1]
    raise ValueError("player is nowhere")


def visible_entities(state: State, room: EntityId | None = None) -> list[EntityId]:
    """What the player can currently refer to.

    Room furniture, items on the floor and on supporters, the contents of
    open containers, carried items, and the doors of adjacent exits.  Closed
    containers hide their contents.
    """
    room = room or player_room(state)
    out: dict[str, EntityId] = {}
    furniture: list[EntityId] = []
    for atom in state.by_predicate("at"):
        if atom.args[1] == room and atom.args[0] != kb.PLAYER:
            out[atom.args[0].id] = atom.args[0]
            furniture.append(atom.args[0])
    open_here: set[str] = set()
    for e in furniture:
        if e.type_tag == "c" and any(a.args[0] == e for a in state.by_predicate("open")):
            open_here.add(e.id)
    supporters = {e.id for e in furniture if e.type_tag == "s"}
    for atom in state.by_predicate("in"):
        holder = atom.args[1]
        if holder == kb.INVENTORY or holder.id in open_here:
            out[atom.args[0].id] = atom.args[0]
    for atom in state.by_predicate("on"):
        if atom.args[1].id in supporters:
            out[atom.args[0].id] = atom.args[0]
    for atom in state.by_predicate("exit"):
        if atom.args[0] == room and atom.predicate.arity == 4:
            out[atom.args[3].id] = atom.args[3]
    return [out[k] for k in sorted(out)]


def _entity_words(entity: EntityId, names: NameTable) -> frozenset[str]:
    name = names[entity.id]
    words = set(name.display.lower().split())
    if entity.type_tag in ("f", "k", "o"):
        words |= GENERIC_PORTABLE
    if entity.type_tag == "d":
        words.add("door")
    return frozenset(words)


def resolve_phrase(
    phrase: Sequence[str], scope: Sequence[EntityId], names: NameTable
) -> EntityId:
    """Find the single in-scope entity the words single out."""
    if not phrase:
        raise CommandError("unknown_noun", "that")
    want = set(phrase)
    hits = [e for e in scope if want <= _entity_words(e, names)]
    if not hits:
        raise CommandError("unknown_noun", " ".join(phrase))
    if len(hits) > 1:
        raise CommandError("ambiguous", " ".join(phrase))
    return hits[0]


def resolve(
    cmd: Command,
    state: State,
    names: NameTable,
    vocab: Vocabulary,
    admissible: Sequence[GroundAction],
) -> GroundAction:
    """Ground a parsed command against the admissible actions."""
    rule_verbs = vocab.verbs.get(cmd.verb, ())
    if not rule_verbs:
        raise CommandError("unknown_verb", cmd.verb)
    if cmd.verb == "go":
        if len(cmd.np1) != 1 or cmd.np1[0] not in kb.DIRECTIONS or cmd.np2:
            raise CommandError("unknown_noun", " ".join(cmd.np1) or "that")
        direction = cmd.np1[0]
        matches = [
            a
            for a in admissible
            if a.rule.verb == "go" and a.binding["dir"].id == direction
        ]
        if not matches:
            raise CommandError("not_admissible", direction)
        return matches[0]

    scope = visible_entities(state)
    first = resolve_phrase(cmd.np1, scope, names)
    second = resolve_phrase(cmd.np2, scope, names) if cmd.np2 else None
    matches = []
    for action in admissible:
        if action.rule.verb not in rule_verbs:
            continue
        args = action.command_args()
        if not args or args[0] != first:
            continue
        if second is not None and (len(args) < 2 or args[1] != second):
            continue
        matches.append(action)
    if not matches:
        raise CommandError("not_admissible", cmd.verb)
    distinct = {a for a in matches}
    if len(distinct) > 1:
        raise CommandError("ambiguous", " ".join(cmd.np1))
    return matches[0]
