"""Domain knowledge: entity types, predicates, built-in rules, reciprocals.

The rule set ships as a textual listing (one line per rule) that parses back
into identical schemas, so serialized games are self-contained.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .logic import (
    Atom,
    EntityId,
    GroundAction,
    PatternAtom,
    Predicate,
    Premise,
    RuleSchema,
    State,
    Variable,
    admissible_actions,
)


class RuleSyntaxError(Exception):
    """A rule line failed to parse."""


# ---------------------------------------------------------------------------
# Entity types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class EntityTypeDef:
    tag: str
    attributes: frozenset[str]
    parent: str | None = None


ATTR_PORTABLE = "portable"
ATTR_FIXED = "fixed-in-place"
ATTR_OPENABLE = "openable"
ATTR_LOCKABLE = "lockable"
ATTR_EDIBLE = "edible"


class TypeHierarchy:
    """Single-parent type tree with inherited attribute sets."""

    def __init__(self, defs: Iterable[EntityTypeDef]):
        self.defs: dict[str, EntityTypeDef] = {}
        for d in defs:
            if d.tag in self.defs:
                raise ValueError(f"duplicate type tag {d.tag!r}")
            self.defs[d.tag] = d
        for d in self.defs.values():
            if d.parent is not None and d.parent not in self.defs:
                raise ValueError(f"type {d.tag!r}: unknown parent {d.parent!r}")
        self._ancestors: dict[str, frozenset[str]] = {}
        for tag in self.defs:
            chain = []
            cur: str | None = tag
            while cur is not None:
                if cur in chain:
                    raise ValueError(f"type cycle through {cur!r}")
                chain.append(cur)
                cur = self.defs[cur].parent
            self._ancestors[tag] = frozenset(chain)
        self._attrs: dict[str, frozenset[str]] = {
            tag: frozenset().union(*(self.defs[a].attributes for a in self._ancestors[tag]))
            for tag in self.defs
        }
        for tag, attrs in self._attrs.items():
            if ATTR_EDIBLE in attrs and ATTR_PORTABLE not in attrs:
                raise ValueError(f"type {tag!r}: edible requires portable")
            if ATTR_LOCKABLE in attrs and ATTR_OPENABLE not in attrs:
                raise ValueError(f"type {tag!r}: lockable requires openable")

    def is_a(self, tag: str, ancestor: str) -> bool:
        return ancestor in self._ancestors[tag]

    def conforms(self, entity: EntityId, type_tag: str) -> bool:
        anc = self._ancestors.get(entity.type_tag)
        return anc is not None and type_tag in anc

    def attributes(self, tag: str) -> frozenset[str]:
        return self._attrs[tag]

    def concrete_subtypes(self, tag: str) -> tuple[str, ...]:
        leaves = [
            t for t in self.defs
            if self.is_a(t, tag) and not any(d.parent == t for d in self.defs.values())
        ]
        return tuple(sorted(leaves))


TYPES = TypeHierarchy([
    EntityTypeDef("t", frozenset()),
    EntityTypeDef("r", frozenset(), "t"),
    EntityTypeDef("dir", frozenset(), "t"),
    EntityTypeDef("p", frozenset(), "t"),
    EntityTypeDef("h", frozenset(), "t"),           # things that hold objects inside
    EntityTypeDef("i", frozenset(), "h"),
    EntityTypeDef("c", frozenset({ATTR_FIXED, ATTR_OPENABLE, ATTR_LOCKABLE}), "h"),
    EntityTypeDef("s", frozenset({ATTR_FIXED}), "t"),
    EntityTypeDef("d", frozenset({ATTR_FIXED, ATTR_OPENABLE, ATTR_LOCKABLE}), "t"),
    EntityTypeDef("o", frozenset({ATTR_PORTABLE}), "t"),
    EntityTypeDef("f", frozenset({ATTR_EDIBLE}), "o"),
    EntityTypeDef("k", frozenset(), "o"),
])

PLAYER = EntityId("P", "p")
INVENTORY = EntityId("I", "i")

DIRECTIONS: dict[str, EntityId] = {
    name: EntityId(name, "dir")
    for name in ("north", "south", "east", "west", "up", "down")
}

OPPOSITE = {
    "north": "south", "south": "north",
    "east": "west", "west": "east",
    "up": "down", "down": "up",
}

CONSTANTS: dict[str, EntityId] = {"P": PLAYER, "I": INVENTORY, **DIRECTIONS}


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------

PREDICATES: dict[tuple[str, int], Predicate] = {}


def _pred(name: str, *param_types: str) -> Predicate:
    p = Predicate(name, len(param_types), tuple(param_types))
    PREDICATES[(name, p.arity)] = p
    return p


AT = _pred("at", "t", "r")
IN = _pred("in", "o", "h")
ON = _pred("on", "o", "s")
OPEN = _pred("open", "t")
CLOSED = _pred("closed", "t")
LOCKED = _pred("locked", "t")
EATEN = _pred("eaten", "f")
MATCH = _pred("match", "k", "t")
EXIT = _pred("exit", "r", "dir", "r")
DOOR_EXIT = _pred("exit", "r", "dir", "r", "d")


def predicate(name: str, arity: int) -> Predicate:
    try:
        return PREDICATES[(name, arity)]
    except KeyError:
        raise RuleSyntaxError(f"unknown predicate {name}/{arity}")


# ---------------------------------------------------------------------------
# Rule text codec
# ---------------------------------------------------------------------------
#
# Line form:   name :: var:type ... :: lhs -> rhs :: command template
# LHS/RHS are "&"-joined atoms; "$" marks a persistent premise.  Uppercase
# P and I and the direction words are constants; every other argument token
# must be a declared variable.

RULE_FORMAT_VERSION = 1


def parse_rule(line: str) -> RuleSchema:
    parts = [p.strip() for p in line.split("::")]
    if len(parts) != 4:
        raise RuleSyntaxError(f"expected 4 '::' sections: {line!r}")
    name, var_text, body, template = parts
    params: dict[str, Variable] = {}
    if var_text != "-":
        for tok in var_text.split():
            if ":" not in tok:
                raise RuleSyntaxError(f"bad variable declaration {tok!r} in {name}")
            vname, vtype = tok.split(":", 1)
            if vtype not in TYPES.defs:
                raise RuleSyntaxError(f"unknown type {vtype!r} in {name}")
            if vname in params or vname in CONSTANTS:
                raise RuleSyntaxError(f"duplicate or reserved variable {vname!r} in {name}")
            params[vname] = Variable(vname, vtype)

    if "->" not in body:
        raise RuleSyntaxError(f"missing '->' in {name}")
    lhs_text, rhs_text = body.split("->", 1)

    def parse_atom(text: str) -> PatternAtom:
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise RuleSyntaxError(f"bad atom {text!r} in {name}")
        pname, arg_text = text[:-1].split("(", 1)
        args = []
        for tok in (t.strip() for t in arg_text.split(",")):
            if tok in CONSTANTS:
                args.append(CONSTANTS[tok])
            elif tok in params:
                args.append(params[tok])
            else:
                raise RuleSyntaxError(f"undeclared argument {tok!r} in {name}")
        return PatternAtom(predicate(pname.strip(), len(args)), tuple(args))

    premises = []
    for chunk in (c.strip() for c in lhs_text.split("&")):
        persistent = chunk.startswith("$")
        premises.append(Premise(parse_atom(chunk.lstrip("$")), persistent))
    rhs = tuple(parse_atom(c) for c in rhs_text.split("&"))
    return RuleSchema(name, tuple(params.values()), tuple(premises), rhs, template)


def encode_rule(rule: RuleSchema) -> str:
    var_text = " ".join(f"{v.name}:{v.type_tag}" for v in rule.params) or "-"
    lhs = " & ".join(p.encode() for p in rule.lhs)
    rhs = " & ".join(a.encode() for a in rule.rhs)
    return f"{rule.name} :: {var_text} :: {lhs} -> {rhs} :: {rule.command_template}"


# ---------------------------------------------------------------------------
# Built-in rules
# ---------------------------------------------------------------------------

# The seven rules of the one-room working example.
CORE_RULE_TEXT = [
    "open/c :: c:c r:r :: $at(P, r) & $at(c, r) & closed(c) -> open(c) :: open {c}",
    "close/c :: c:c r:r :: $at(P, r) & $at(c, r) & open(c) -> closed(c) :: close {c}",
    "take/c :: o:o c:c r:r :: $at(P, r) & $at(c, r) & $open(c) & in(o, c) -> in(o, I) :: take {o} from {c}",
    "take/s :: o:o s:s r:r :: $at(P, r) & $at(s, r) & on(o, s) -> in(o, I) :: take {o} from {s}",
    "put :: o:o s:s r:r :: $at(P, r) & $at(s, r) & in(o, I) -> on(o, s) :: put {o} on {s}",
    "insert :: o:o c:c r:r :: $at(P, r) & $at(c, r) & $open(c) & in(o, I) -> in(o, c) :: insert {o} into {c}",
    "eat :: f:f :: in(f, I) -> eaten(f) :: eat {f}",
]

# Navigation, doors, locks and floor handling needed by generated worlds.
EXTENSION_RULE_TEXT = [
    "go/free :: r:r dir:dir r2:r :: at(P, r) & $exit(r, dir, r2) -> at(P, r2) :: go {dir}",
    "go/door :: r:r dir:dir r2:r d:d :: at(P, r) & $exit(r, dir, r2, d) & $open(d) -> at(P, r2) :: go {dir}",
    "open/d :: d:d r:r dir:dir r2:r :: $at(P, r) & $exit(r, dir, r2, d) & closed(d) -> open(d) :: open {d}",
    "close/d :: d:d r:r dir:dir r2:r :: $at(P, r) & $exit(r, dir, r2, d) & open(d) -> closed(d) :: close {d}",
    "lock/c :: c:c k:k r:r :: $at(P, r) & $at(c, r) & $in(k, I) & $match(k, c) & closed(c) -> locked(c) :: lock {c} with {k}",
    "unlock/c :: c:c k:k r:r :: $at(P, r) & $at(c, r) & $in(k, I) & $match(k, c) & locked(c) -> closed(c) :: unlock {c} with {k}",
    "lock/d :: d:d k:k r:r dir:dir r2:r :: $at(P, r) & $exit(r, dir, r2, d) & $in(k, I) & $match(k, d) & closed(d) -> locked(d) :: lock {d} with {k}",
    "unlock/d :: d:d k:k r:r dir:dir r2:r :: $at(P, r) & $exit(r, dir, r2, d) & $in(k, I) & $match(k, d) & locked(d) -> closed(d) :: unlock {d} with {k}",
    "take/r :: o:o r:r :: $at(P, r) & at(o, r) -> in(o, I) :: take {o}",
    "drop :: o:o r:r :: $at(P, r) & in(o, I) -> at(o, r) :: drop {o}",
]

RECIPROCALS = {
    "open/c": "close/c",
    "close/c": "open/c",
    "open/d": "close/d",
    "close/d": "open/d",
    "lock/c": "unlock/c",
    "unlock/c": "lock/c",
    "lock/d": "unlock/d",
    "unlock/d": "lock/d",
    "take/c": "insert",
    "insert": "take/c",
    "take/s": "put",
    "put": "take/s",
    "take/r": "drop",
    "drop": "take/r",
    "go/free": "go/free",
    "go/door": "go/door",
}


@dataclass
class RuleSet:
    """Named rules plus the action-reversal map and the type hierarchy."""

    rules: dict[str, RuleSchema]
    reciprocal_map: dict[str, str] = field(default_factory=dict)
    types: TypeHierarchy = TYPES

    def __iter__(self):
        return iter(self.rules.values())

    def __getitem__(self, name: str) -> RuleSchema:
        return self.rules[name]

    def by_verb(self, verb: str) -> list[RuleSchema]:
        return [r for r in self.rules.values() if r.verb == verb]

    def admissible(self, state: State) -> tuple[GroundAction, ...]:
        return admissible_actions(state, self.rules.values(), self.types)

    def ground(self, name: str, **binding: EntityId) -> GroundAction:
        return self.rules[name].ground(binding)

    def reciprocal_action(self, action: GroundAction) -> GroundAction | None:
        """The ground action undoing ``action``, or None (e.g. for eat)."""
        recip_name = self.reciprocal_map.get(action.rule.name)
        if recip_name is None:
            return None
        binding = action.binding
        if action.rule.verb == "go":
            binding = dict(binding)
            binding["r"], binding["r2"] = binding["r2"], binding["r"]
            binding["dir"] = DIRECTIONS[OPPOSITE[binding["dir"].id]]
        return self.rules[recip_name].ground(binding)

    def encode_listing(self) -> dict:
        return {
            "format_version": RULE_FORMAT_VERSION,
            "rules": [encode_rule(r) for r in self.rules.values()],
            "reciprocals": dict(self.reciprocal_map),
        }

    @classmethod
    def from_listing(cls, doc: Mapping) -> "RuleSet":
        if doc.get("format_version") != RULE_FORMAT_VERSION:
            raise RuleSyntaxError(f"unsupported rule format: {doc.get('format_version')!r}")
        rules = {}
        for line in doc["rules"]:
            rule = parse_rule(line)
            rules[rule.name] = rule
        return cls(rules, dict(doc.get("reciprocals", {})))


def core_rules() -> RuleSet:
    """The seven-rule set of the one-room container/supporter example."""
    rules = {r.name: r for r in map(parse_rule, CORE_RULE_TEXT)}
    recips = {a: b for a, b in RECIPROCALS.items() if a in rules and b in rules}
    return RuleSet(rules, recips)


def builtin_rules() -> RuleSet:
    """Core rules plus navigation, door, lock and floor extensions."""
    rules = {r.name: r for r in map(parse_rule, CORE_RULE_TEXT + EXTENSION_RULE_TEXT)}
    return RuleSet(rules, dict(RECIPROCALS))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

_STATUS_PREDS = ("open", "closed", "locked")


def validate(rs: RuleSet) -> list[str]:
    """Structural diagnostics; empty list means the rule set is well formed."""
    issues: list[str] = []
    for rule in rs:
        declared = {v.name for v in rule.params}
        seen: set[str] = set()
        for prem in rule.lhs:
            seen.update(v.name for v in prem.pattern.variables())
        rhs_vars: set[str] = set()
        for a in rule.rhs:
            rhs_vars.update(v.name for v in a.variables())
        if not rhs_vars <= declared:
            issues.append(f"{rule.name}: RHS variable outside params")
        if seen != declared:
            missing = declared - seen
            extra = seen - declared
            if missing:
                issues.append(f"{rule.name}: params never matched on LHS: {sorted(missing)}")
            if extra:
                issues.append(f"{rule.name}: undeclared LHS variables: {sorted(extra)}")
        for pat in [p.pattern for p in rule.lhs] + list(rule.rhs):
            for term, pos_type in zip(pat.args, pat.predicate.param_types):
                tag = term.type_tag
                if not rs.types.is_a(tag, pos_type):
                    issues.append(
                        f"{rule.name}: {pat.encode()} argument {term} is {tag}, needs {pos_type}"
                    )
            if pat.predicate.name in _STATUS_PREDS:
                tag = pat.args[0].type_tag
                if ATTR_OPENABLE not in rs.types.attributes(tag) and tag != "t":
                    issues.append(f"{rule.name}: {pat.encode()} on non-openable type {tag}")
        # Multiplicity safety: a product duplicating a persistent premise would
        # push an atom count above one.
        persists = {p.pattern for p in rule.lhs if p.persistent}
        if len(set(rule.rhs)) != len(rule.rhs):
            issues.append(f"{rule.name}: duplicate RHS atoms")
        if persists & set(rule.rhs):
            issues.append(f"{rule.name}: RHS repeats a persistent premise")
    issues.extend(_check_reciprocals(rs))
    return issues


def _check_reciprocals(rs: RuleSet) -> list[str]:
    issues = []
    for name, recip in rs.reciprocal_map.items():
        if name not in rs.rules or recip not in rs.rules:
            issues.append(f"reciprocal map references unknown rule: {name} -> {recip}")
            continue
        if rs.reciprocal_map.get(recip) != name:
            issues.append(f"reciprocal map is not symmetric at {name}")
            continue
        rule = rs.rules[name]
        binding: dict[str, EntityId] = {}
        for v in rule.params:
            if v.type_tag == "dir":
                binding[v.name] = DIRECTIONS["north"]
            else:
                binding[v.name] = EntityId(f"probe_{v.name}", _probe_tag(rs.types, v.type_tag))
        action = rule.ground(binding)
        back = rs.reciprocal_action(action)
        if back is None:
            issues.append(f"{name}: reciprocal_action returned nothing")
            continue
        probe_atoms = set(action.consumed) | set(action.required)
        probe_atoms |= set(back.required) - set(action.produced)
        probe = State(probe_atoms)
        try:
            from .logic import apply_action

            after = apply_action(probe, action)
            restored = apply_action(after, back)
        except Exception as exc:  # diagnostics, not control flow
            issues.append(f"{name}: probe failed: {exc}")
            continue
        if restored != probe:
            issues.append(f"{name}: applying rule then reciprocal does not restore the state")
    return issues


def _probe_tag(types: TypeHierarchy, tag: str) -> str:
    subs = types.concrete_subtypes(tag)
    return subs[0] if subs else tag
