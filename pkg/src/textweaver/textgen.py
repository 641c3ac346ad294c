"""Theme text: grammar files, entity naming, room prose and feedback lines.

A theme is a grammar file merged over the shared base grammar.  Productions
look like ``NAME -> alt | 2* alt`` where alternatives may reference other
productions as ``<NAME>`` and take runtime slots as ``#slot#``.  Feedback and
error productions in the base grammar have a single alternative each, so
action feedback never varies by seed or theme.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

from . import kb
from .logic import Atom, EntityId, GroundAction, State
from .rng import stream


class GrammarError(Exception):
    """Malformed grammar text or an unexpandable production."""


class NameExhaustion(Exception):
    """A theme's name pool is too small for the world being named."""


_PROD_RE = re.compile(r"^(\w+)\s*->\s*(.+)$")
_WEIGHT_RE = re.compile(r"^(\d+)\*\s*(.*)$")
_REF_RE = re.compile(r"<(\w+)>")
_SLOT_RE = re.compile(r"#(\w+)#")
_MAX_DEPTH = 16


@dataclass
class Grammar:
    productions: dict[str, list[tuple[int, str]]]

    @classmethod
    def parse(cls, text: str) -> "Grammar":
        productions: dict[str, list[tuple[int, str]]] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("!"):
                continue
            m = _PROD_RE.match(line)
            if not m:
                raise GrammarError(f"line {lineno}: expected 'NAME -> alternatives'")
            name, body = m.groups()
            if name in productions:
                raise GrammarError(f"line {lineno}: duplicate production {name!r}")
            alts: list[tuple[int, str]] = []
            for alt in body.split(" | "):
                alt = alt.strip()
                weight = 1
                wm = _WEIGHT_RE.match(alt)
                if wm:
                    weight, alt = int(wm.group(1)), wm.group(2)
                if not alt:
                    raise GrammarError(f"line {lineno}: empty alternative in {name!r}")
                alts.append((weight, alt))
            productions[name] = alts
        return cls(productions)

    def merge(self, other: "Grammar") -> "Grammar":
        overlap = set(self.productions) & set(other.productions)
        if overlap:
            raise GrammarError(f"productions defined twice: {sorted(overlap)}")
        return Grammar({**self.productions, **other.productions})

    def alternatives(self, name: str) -> list[str]:
        try:
            return [alt for _, alt in self.productions[name]]
        except KeyError:
            raise GrammarError(f"unknown production {name!r}")

    def expand(
        self,
        name: str,
        rng: random.Random,
        slots: Mapping[str, str] | None = None,
        _depth: int = 0,
    ) -> str:
        if _depth > _MAX_DEPTH:
            raise GrammarError(f"recursion too deep expanding {name!r}")
        if name not in self.productions:
            raise GrammarError(f"unknown production {name!r}")
        alts = self.productions[name]
        weights = [w for w, _ in alts]
        template = rng.choices([a for _, a in alts], weights)[0]
        out = _REF_RE.sub(
            lambda m: self.expand(m.group(1), rng, slots, _depth + 1), template
        )
        if slots is not None:
            out = _SLOT_RE.sub(
                lambda m: slots[m.group(1)] if m.group(1) in slots else m.group(0), out
            )
        leftover = _SLOT_RE.search(out)
        if leftover:
            raise GrammarError(f"unfilled slot #{leftover.group(1)}# in {name!r}")
        return out


def load_theme(theme: str) -> Grammar:
    folder = resources.files("textweaver") / "grammars"
    base = Grammar.parse((folder / "base.grammar").read_text())
    path = folder / f"{theme}.grammar"
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise GrammarError(f"unknown theme {theme!r}; available: {available_themes()}")
    return base.merge(Grammar.parse(text))


def available_themes() -> list[str]:
    folder = resources.files("textweaver") / "grammars"
    return sorted(
        p.name.removesuffix(".grammar")
        for p in folder.iterdir()
        if p.name.endswith(".grammar") and p.name != "base.grammar"
    )


# ---------------------------------------------------------------------------
# Naming
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


@dataclass(frozen=True)
class Name:
    noun: str
    adjective: str | None = None
    bare: bool = False  # numbered style: no articles at all

    @property
    def display(self) -> str:
        return f"{self.adjective} {self.noun}" if self.adjective else self.noun

    def listed(self) -> str:
        """Indefinite form used in listings, e.g. 'an old crate'."""
        if self.bare:
            return self.display
        first = self.display[0].lower()
        return f"an {self.display}" if first in _VOWELS else f"a {self.display}"

    def definite(self) -> str:
        return self.display if self.bare else f"the {self.display}"


class NameTable:
    def __init__(self, names: dict[str, Name]):
        self.names = names

    def __getitem__(self, entity_id: str) -> Name:
        return self.names[entity_id]

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.names

    def display(self, entity_id: str) -> str:
        return self.names[entity_id].display

    def encode(self) -> dict:
        return {
            eid: {"noun": n.noun, "adjective": n.adjective, "bare": n.bare}
            for eid, n in sorted(self.names.items())
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "NameTable":
        return cls(
            {
                eid: Name(d["noun"], d.get("adjective"), bool(d.get("bare")))
                for eid, d in doc.items()
            }
        )


_POOL_BY_TAG = {
    "r": "ROOM_NOUN",
    "c": "CONTAINER_NOUN",
    "s": "SUPPORTER_NOUN",
    "f": "FOOD_NOUN",
    "d": "DOOR_NOUN",
}


def assign_names(
    entities: Sequence[EntityId],
    state: State,
    grammar: Grammar,
    text_seed: int,
) -> NameTable:
    """Deterministically name every entity.

    Pairs style draws unique nouns per type with a flavour adjective; a key
    that matches a lock inherits the lock's adjective so the pairing reads in
    the prose.  Numbered style appends a random unique number to a per-type
    prefix.  Raises NameExhaustion when a pool runs dry.
    """
    rng = stream(text_seed, "names")
    style = grammar.alternatives("NAME_STYLE")[0]
    names: dict[str, Name] = {
        kb.PLAYER.id: Name("you", bare=True),
        kb.INVENTORY.id: Name("inventory", bare=True),
    }
    for direction in kb.DIRECTIONS:
        names[direction] = Name(direction, bare=True)

    ordered = [e for e in entities if e.type_tag != "k"] + [
        e for e in entities if e.type_tag == "k"
    ]

    if style == "numbered":
        numbers: dict[str, list[int]] = {}
        for e in ordered:
            prefix = grammar.alternatives(f"PREFIX_{e.type_tag}")[0]
            pool = numbers.setdefault(prefix, rng.sample(range(100), 100))
            if not pool:
                raise NameExhaustion(f"no numbers left for {prefix!r}")
            names[e.id] = Name(f"{prefix}{pool.pop()}", bare=True)
        return NameTable(names)

    if style != "pairs":
        raise GrammarError(f"unknown NAME_STYLE {style!r}")

    pools: dict[str, list[str]] = {}
    for tag, prod in _POOL_BY_TAG.items():
        pool = list(grammar.alternatives(prod))
        rng.shuffle(pool)
        pools[tag] = pool
    adjectives = list(grammar.alternatives("OBJ_ADJ"))
    rng.shuffle(adjectives)
    key_nouns = list(grammar.alternatives("KEY_NOUN"))
    used_displays: set[str] = set()
    lock_of_key: dict[str, str] = {}
    for atom in state.by_predicate("match"):
        lock_of_key.setdefault(atom.args[0].id, atom.args[1].id)

    adj_cursor = 0

    def next_adjective() -> str:
        nonlocal adj_cursor
        adj = adjectives[adj_cursor % len(adjectives)]
        adj_cursor += 1
        return adj

    def claim(name: Name) -> Name:
        if name.display in used_displays:
            raise NameExhaustion(f"name collision for {name.display!r}")
        used_displays.add(name.display)
        return name

    def draw(tag: str, qualified: bool) -> Name:
        pool = pools.get(tag)
        if pool is None:
            raise GrammarError(f"no name pool for type {tag!r}")
        if not pool:
            # reuse nouns once the pool runs dry; adjectives keep them apart
            fresh = list(grammar.alternatives(_POOL_BY_TAG[tag]))
            rng.shuffle(fresh)
            pool.extend(fresh)
            qualified = True
        noun = pool.pop()
        if not qualified:
            return claim(Name(noun))
        for _ in range(len(adjectives)):
            trial = Name(noun, next_adjective())
            if trial.display not in used_displays:
                return claim(trial)
        raise NameExhaustion(f"out of names for type {tag!r}")

    for e in ordered:
        if e.type_tag == "r":
            names[e.id] = draw("r", qualified=False)
        elif e.type_tag == "k":
            lock = lock_of_key.get(e.id)
            if lock is not None and lock in names:
                candidates = [names[lock].adjective]
            else:
                candidates = [next_adjective() for _ in range(len(adjectives))]
            named = None
            for adj in candidates:
                for noun in key_nouns:
                    trial = Name(noun, adj)
                    if trial.display not in used_displays:
                        named = claim(trial)
                        break
                if named:
                    break
            if named is None:
                raise NameExhaustion("out of key names")
            names[e.id] = named
        else:
            names[e.id] = draw(e.type_tag, qualified=True)
    return NameTable(names)


# ---------------------------------------------------------------------------
# Prose
# ---------------------------------------------------------------------------

def phrase_join(parts: Sequence[str]) -> str:
    if not parts:
        return "nothing"
    if len(parts) == 1:
        return parts[0]
    return ", ".join(parts[:-1]) + " and " + parts[-1]


class TextEngine:
    """Renders observations for one game: fixed grammar, names and seed."""

    def __init__(self, grammar: Grammar, names: NameTable, text_seed: int):
        self.grammar = grammar
        self.names = names
        self.text_seed = text_seed
        # feedback productions are single-alternative; rng value irrelevant
        self._flat = random.Random(0)

    # -- helpers ---------------------------------------------------------

    def _items_phrase(self, ids: Iterable[str]) -> str:
        listed = sorted(self.names[i].listed() for i in ids)
        return phrase_join(listed)

    def render_command(self, action: GroundAction) -> str:
        """The canonical typed command for an action, e.g. 'take apple'."""
        out = action.rule.command_template
        for param, value in action.binding.items():
            out = out.replace("{" + param + "}", self.names.display(value.id))
        return out

    def _imperative(self, action: GroundAction) -> str:
        out = action.rule.command_template
        for param, value in action.binding.items():
            out = out.replace("{" + param + "}", self.names[value.id].definite())
        return out

    def objective_text(self, actions: Sequence[GroundAction]) -> str:
        if not actions:
            return "Explore at your leisure."
        steps = ", then ".join(self._imperative(a) for a in actions)
        return self.grammar.expand("OBJECTIVE", self._flat, {"steps": steps})

    # -- room prose ------------------------------------------------------

    def room_description(self, room: EntityId, state: State) -> str:
        rng = stream(self.text_seed, "room", room.id)
        here = {a.args[0] for a in state.by_predicate("at") if a.args[1] == room}
        here.discard(kb.PLAYER)
        containers = sorted(
            (e for e in here if e.type_tag == "c"), key=lambda e: self.names.display(e.id)
        )
        supporters = sorted(
            (e for e in here if e.type_tag == "s"), key=lambda e: self.names.display(e.id)
        )
        floor = sorted(
            (e for e in here if e not in containers and e not in supporters),
            key=lambda e: self.names.display(e.id),
        )
        parts = [self.grammar.expand("ROOM_INTRO", rng, {"room": self.names.display(room.id)})]
        for c in containers:
            slots = {"c": self.names.display(c.id)}
            if Atom(kb.LOCKED, (c,)) in state:
                parts.append(self.grammar.expand("CONTAINER_LOCKED", rng, slots))
            elif Atom(kb.CLOSED, (c,)) in state:
                parts.append(self.grammar.expand("CONTAINER_CLOSED", rng, slots))
            else:
                parts.append(self.grammar.expand("CONTAINER_OPEN", rng, slots))
                contents = [a.args[0].id for a in state.by_predicate("in") if a.args[1] == c]
                if contents:
                    parts.append(
                        self.grammar.expand(
                            "fb_reveal", rng, {"items": self._items_phrase(contents)}
                        )
                    )
        for s in supporters:
            onto = [a.args[0].id for a in state.by_predicate("on") if a.args[1] == s]
            slots = {"s": self.names.display(s.id), "items": self._items_phrase(onto)}
            if onto:
                parts.append(self.grammar.expand("SUPPORTER_NOTE", rng, slots))
            else:
                parts.append(self.grammar.expand("SUPPORTER_EMPTY", rng, slots))
        if floor:
            parts.append(
                self.grammar.expand(
                    "FLOOR_NOTE", rng, {"items": self._items_phrase(e.id for e in floor)}
                )
            )
        free_dirs: list[str] = []
        door_notes: list[str] = []
        for atom in state.by_predicate("exit"):
            if atom.args[0] != room:
                continue
            direction = atom.args[1].id
            if atom.predicate.arity == 3:
                free_dirs.append(direction)
            else:
                door = atom.args[3]
                slots = {"d": self.names.display(door.id), "dir": direction}
                if Atom(kb.LOCKED, (door,)) in state:
                    door_notes.append(self.grammar.expand("DOOR_LOCKED", rng, slots))
                elif Atom(kb.CLOSED, (door,)) in state:
                    door_notes.append(self.grammar.expand("DOOR_CLOSED", rng, slots))
                else:
                    door_notes.append(self.grammar.expand("DOOR_OPEN", rng, slots))
        order = {d: i for i, d in enumerate(kb.DIRECTIONS)}
        free_dirs.sort(key=order.__getitem__)
        if free_dirs:
            parts.append(
                self.grammar.expand("EXIT_NOTE", rng, {"exits": phrase_join(free_dirs)})
            )
        parts.extend(door_notes)
        if not free_dirs and not door_notes:
            parts.append(self.grammar.expand("EXIT_NONE", rng))
        return " ".join(parts)

    # -- feedback ---------------------------------------------------------

    def feedback(self, action: GroundAction, after: State) -> str:
        prod = "fb_" + action.rule.name.replace("/", "_")
        slots = {
            param: self.names.display(value.id) for param, value in action.binding.items()
        }
        out = self.grammar.expand(prod, self._flat, slots)
        if action.rule.name == "open/c":
            container = action.binding["c"]
            contents = [
                a.args[0].id for a in after.by_predicate("in") if a.args[1] == container
            ]
            if contents:
                out += " " + self.grammar.expand(
                    "fb_reveal", self._flat, {"items": self._items_phrase(contents)}
                )
            else:
                out += " " + self.grammar.expand("fb_reveal_empty", self._flat)
        return out

    def inventory_text(self, state: State) -> str:
        carried = [
            a.args[0].id for a in state.by_predicate("in") if a.args[1] == kb.INVENTORY
        ]
        if not carried:
            return self.grammar.expand("inv_empty", self._flat)
        return self.grammar.expand(
            "inv", self._flat, {"items": self._items_phrase(carried)}
        )

    def error_text(self, kind: str, word: str = "") -> str:
        return self.grammar.expand(f"err_{kind}", self._flat, {"word": word})

    def win_text(self) -> str:
        return self.grammar.expand("WIN", self._flat)

    def lose_text(self) -> str:
        return self.grammar.expand("LOSE", self._flat)

    def hint_text(self, target_id: str) -> str:
        return self.grammar.expand(
            "TH_HINT", self._flat, {"target": self.names.display(target_id)}
        )
