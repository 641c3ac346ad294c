"""Multiset state rewriting: atoms, rules, grounding, admissible actions.

A world state is a multiset of ground atoms.  A rule consumes the
non-persistent atoms on its left-hand side and produces its right-hand
side; premises marked persistent must be present but are left untouched.
Applying one rule under one variable binding is a single game action.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence


class NotApplicable(Exception):
    """A ground action's premises are missing from the state."""


@dataclass(frozen=True, slots=True)
class EntityId:
    """A world entity: opaque id plus a type tag from the type hierarchy."""

    id: str
    type_tag: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True, slots=True)
class Variable:
    name: str
    type_tag: str

    def __str__(self) -> str:
        return self.name


# A term in a pattern atom is either a concrete entity or a typed variable.
Term = "EntityId | Variable"


@dataclass(frozen=True, slots=True)
class Predicate:
    name: str
    arity: int
    # Loosest type tag accepted at each argument position.
    param_types: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.param_types) != self.arity:
            raise ValueError(f"predicate {self.name}: arity/param_types mismatch")


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: Predicate
    args: tuple[EntityId, ...]

    def __post_init__(self) -> None:
        if len(self.args) != self.predicate.arity:
            raise ValueError(
                f"{self.predicate.name} takes {self.predicate.arity} args, got {len(self.args)}"
            )

    def encode(self) -> str:
        return f"{self.predicate.name}({','.join(a.id for a in self.args)})"

    def sort_key(self) -> tuple:
        return (self.predicate.name, tuple(a.id for a in self.args))


@dataclass(frozen=True, slots=True)
class PatternAtom:
    """An atom whose arguments may be variables."""

    predicate: Predicate
    args: tuple[object, ...]  # EntityId | Variable

    def substitute(self, binding: Mapping[str, EntityId]) -> Atom:
        out = []
        for term in self.args:
            if isinstance(term, Variable):
                try:
                    out.append(binding[term.name])
                except KeyError:
                    raise KeyError(f"unbound variable {term.name!r} in {self.encode()}")
            else:
                out.append(term)
        return Atom(self.predicate, tuple(out))

    def variables(self) -> tuple[Variable, ...]:
        return tuple(t for t in self.args if isinstance(t, Variable))

    def encode(self) -> str:
        parts = ", ".join(str(t) for t in self.args)
        return f"{self.predicate.name}({parts})"


class State:
    """Immutable multiset of ground atoms with a canonical sorted form.

    Equality and hashing are order-independent; the canonical form is the
    sorted atom tuple, so two states built from the same atoms in any order
    compare equal.
    """

    __slots__ = ("_atoms", "_hash", "_counts", "_by_pred")

    def __init__(self, atoms: Iterable[Atom]):
        self._atoms: tuple[Atom, ...] = tuple(sorted(atoms, key=Atom.sort_key))
        self._hash = hash(self._atoms)
        self._counts: Counter | None = None
        self._by_pred: dict[str, tuple[Atom, ...]] | None = None

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self._atoms

    def _count_index(self) -> Counter:
        if self._counts is None:
            self._counts = Counter(self._atoms)
        return self._counts

    def count(self, atom: Atom) -> int:
        return self._count_index()[atom]

    def __contains__(self, atom: Atom) -> bool:
        return self._count_index()[atom] > 0

    def contains_all(self, atoms: Iterable[Atom]) -> bool:
        """Multiset inclusion: every atom present with sufficient multiplicity."""
        need = Counter(atoms)
        have = self._count_index()
        return all(have[a] >= n for a, n in need.items())

    def by_predicate(self, name: str) -> tuple[Atom, ...]:
        if self._by_pred is None:
            index: dict[str, list[Atom]] = {}
            for a in self._atoms:
                index.setdefault(a.predicate.name, []).append(a)
            self._by_pred = {k: tuple(v) for k, v in index.items()}
        return self._by_pred.get(name, ())

    def replace(self, remove: Iterable[Atom], add: Iterable[Atom]) -> "State":
        counts = Counter(self._atoms)
        for a in remove:
            if counts[a] <= 0:
                raise NotApplicable(f"atom not in state: {a.encode()}")
            counts[a] -= 1
        for a in add:
            counts[a] += 1
        return State(counts.elements())

    def encode(self) -> str:
        return "\n".join(a.encode() for a in self._atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._atoms)

    def __len__(self) -> int:
        return len(self._atoms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, State) and self._atoms == other._atoms

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"State({len(self._atoms)} atoms)"


@dataclass(frozen=True, slots=True)
class Premise:
    pattern: PatternAtom
    persistent: bool

    def encode(self) -> str:
        mark = "$" if self.persistent else ""
        return mark + self.pattern.encode()


@dataclass(frozen=True, slots=True)
class RuleSchema:
    """A rewrite rule over typed variables.

    ``command_template`` renders the rule as a player command; its ``{var}``
    placeholders double as the declaration of which parameters are the
    action's visible arguments (in order).
    """

    name: str
    params: tuple[Variable, ...]
    lhs: tuple[Premise, ...]
    rhs: tuple[PatternAtom, ...]
    command_template: str = ""

    @property
    def verb(self) -> str:
        return self.name.split("/", 1)[0]

    @property
    def command_params(self) -> tuple[str, ...]:
        import re

        return tuple(re.findall(r"{(\w+)}", self.command_template))

    def param(self, name: str) -> Variable:
        for v in self.params:
            if v.name == name:
                return v
        raise KeyError(name)

    def ground(self, binding: Mapping[str, EntityId]) -> "GroundAction":
        consumed = tuple(p.pattern.substitute(binding) for p in self.lhs if not p.persistent)
        required = tuple(p.pattern.substitute(binding) for p in self.lhs if p.persistent)
        produced = tuple(p.substitute(binding) for p in self.rhs)
        items = tuple(sorted((v.name, binding[v.name]) for v in self.params))
        return GroundAction(self, items, consumed, required, produced)


class GroundAction:
    """A rule plus a complete variable binding.

    Identity is (rule name, binding); the consumed/required/produced ground
    atom tuples are derived and excluded from comparison.
    """

    __slots__ = ("rule", "binding_items", "consumed", "required", "produced", "_hash")

    def __init__(
        self,
        rule: RuleSchema,
        binding_items: tuple[tuple[str, EntityId], ...],
        consumed: tuple[Atom, ...],
        required: tuple[Atom, ...],
        produced: tuple[Atom, ...],
    ):
        self.rule = rule
        self.binding_items = binding_items
        self.consumed = consumed
        self.required = required
        self.produced = produced
        self._hash = hash((rule.name, binding_items))

    @property
    def binding(self) -> dict[str, EntityId]:
        return dict(self.binding_items)

    def command_args(self) -> tuple[EntityId, ...]:
        b = self.binding
        return tuple(b[p] for p in self.rule.command_params)

    def encode(self) -> str:
        """Debug form over the visible arguments, e.g. ``take(apple, fridge)``."""
        args = ", ".join(e.id for e in self.command_args())
        return f"{self.rule.verb}({args})"

    def sort_key(self) -> tuple:
        return (self.encode(), self.rule.name, self.binding_items)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroundAction)
            and self.rule.name == other.rule.name
            and self.binding_items == other.binding_items
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<{self.rule.name} {dict((k, v.id) for k, v in self.binding_items)}>"


def match_patterns(
    patterns: Sequence[PatternAtom],
    state: State,
    types,
    binding: Mapping[str, EntityId] | None = None,
) -> Iterator[dict[str, EntityId]]:
    """Enumerate bindings under which every pattern matches some state atom.

    Match is per-pattern against individual occurrences; multiset multiplicity
    is NOT enforced here (callers needing it check contains_all afterwards).
    """
    base = dict(binding) if binding else {}

    def unify(pattern: PatternAtom, atom: Atom, bnd: dict) -> dict | None:
        out = bnd
        for term, arg in zip(pattern.args, atom.args):
            if isinstance(term, Variable):
                bound = out.get(term.name)
                if bound is None:
                    if not types.conforms(arg, term.type_tag):
                        return None
                    if out is bnd:
                        out = dict(bnd)
                    out[term.name] = arg
                elif bound != arg:
                    return None
            elif term != arg:
                return None
        return out

    def recurse(idx: int, bnd: dict) -> Iterator[dict]:
        if idx == len(patterns):
            yield bnd
            return
        pattern = patterns[idx]
        for atom in state.by_predicate(pattern.predicate.name):
            nxt = unify(pattern, atom, bnd)
            if nxt is not None:
                yield from recurse(idx + 1, nxt)

    yield from recurse(0, base)


def ground_rule(rule: RuleSchema, state: State, types) -> list[GroundAction]:
    """All distinct ground instances of ``rule`` whose full LHS is in ``state``."""
    seen: set[GroundAction] = set()
    out: list[GroundAction] = []
    patterns = [p.pattern for p in rule.lhs]
    for binding in match_patterns(patterns, state, types):
        if len(binding) != len(rule.params):
            continue  # a parameter not mentioned on the LHS stayed unbound
        action = rule.ground(binding)
        # Two consumed premises may not share one occurrence: recheck as multiset.
        if not state.contains_all(action.consumed + action.required):
            continue
        if action not in seen:
            seen.add(action)
            out.append(action)
    out.sort(key=GroundAction.sort_key)
    return out


def apply_action(state: State, action: GroundAction) -> State:
    """Consume the action's non-persistent premises, add its products.

    Atoms not mentioned by the action are untouched.  Raises NotApplicable
    when a consumed or required atom is absent.
    """
    if not state.contains_all(action.consumed + action.required):
        missing = [
            a.encode()
            for a in action.consumed + action.required
            if a not in state
        ]
        raise NotApplicable(f"{action.encode()}: missing {', '.join(missing) or 'multiplicity'}")
    return state.replace(action.consumed, action.produced)


def admissible_actions(state: State, rules: Iterable[RuleSchema], types) -> tuple[GroundAction, ...]:
    """Every applicable ground action, deduplicated, in canonical order."""
    out: list[GroundAction] = []
    for rule in rules:
        out.extend(ground_rule(rule, state, types))
    out.sort(key=GroundAction.sort_key)
    return tuple(out)


@dataclass(slots=True)
class TransitionGraph:
    states: list[State]
    edges: list[tuple[int, GroundAction, int]]
    truncated: bool

    def state_index(self, state: State) -> int:
        return self.states.index(state)


def enumerate_reachable(
    initial: State,
    rules: Iterable[RuleSchema],
    types,
    state_limit: int = 10_000,
) -> TransitionGraph:
    """Breadth-first closure of the action relation, up to ``state_limit`` states.

    When the limit cuts off discovery the graph is flagged truncated and only
    edges between retained states are reported.
    """
    rules = tuple(rules)
    index: dict[State, int] = {initial: 0}
    states = [initial]
    edges: list[tuple[int, GroundAction, int]] = []
    truncated = False
    frontier = 0
    while frontier < len(states):
        src = states[frontier]
        for action in admissible_actions(src, rules, types):
            dst = apply_action(src, action)
            if dst not in index:
                if len(states) >= state_limit:
                    truncated = True
                    continue
                index[dst] = len(states)
                states.append(dst)
            edges.append((frontier, action, index[dst]))
        frontier += 1
    return TransitionGraph(states, edges, truncated)
