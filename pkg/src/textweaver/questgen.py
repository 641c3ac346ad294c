"""Quest search: dependency-chained action sequences over a world state.

Forward chaining walks admissible actions from the initial state; backward
chaining starts from a goal action and unapplies predecessors, creating
missing objects and facts as it goes.  Both reject cycles (no repeated state
along the path) and quests whose winning conditions hold before the final
step.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import kb
from .kb import RuleSet
from .logic import (
    Atom,
    EntityId,
    GroundAction,
    NotApplicable,
    PatternAtom,
    RuleSchema,
    State,
    Variable,
    apply_action,
    match_patterns,
)


class NoQuestFound(Exception):
    """Search exhausted its breadth bound without a valid chain."""


@dataclass(frozen=True)
class Quest:
    actions: tuple[GroundAction, ...]
    winning_conditions: frozenset[Atom]
    losing_conditions: frozenset[Atom] = frozenset()

    def __len__(self) -> int:
        return len(self.actions)


@dataclass(frozen=True, slots=True)
class ChainConfig:
    quest_length: int = 3
    direction: str = "forward"  # forward | backward
    allow_fact_creation: bool = True
    max_search_breadth: int = 5000
    seed: int = 0


def depends_on(action: GroundAction, prev: GroundAction) -> bool:
    """True when an atom flows from ``prev`` into ``action``.

    Either ``prev`` genuinely produced something ``action`` needs, or ``prev``
    touched-and-restored (persistent premise) an atom that ``action`` consumes.
    Shared persistent context alone does not count.
    """
    lhs = set(action.consumed) | set(action.required)
    if set(prev.produced) & lhs:
        return True
    return bool(set(prev.required) & set(action.consumed))


def replay_states(initial: State, actions: Sequence[GroundAction]) -> list[State] | None:
    """States visited by the action sequence, or None if it breaks."""
    states = [initial]
    current = initial
    for action in actions:
        try:
            current = apply_action(current, action)
        except NotApplicable:
            return None
        states.append(current)
    return states


def quest_is_valid(initial: State, quest: Quest) -> bool:
    """Replayable, acyclic, and winning only at the very end."""
    states = replay_states(initial, quest.actions)
    if states is None or len(set(states)) != len(states):
        return False
    if not states[-1].contains_all(quest.winning_conditions):
        return False
    return not any(s.contains_all(quest.winning_conditions) for s in states[:-1])


# ---------------------------------------------------------------------------
# Forward chaining
# ---------------------------------------------------------------------------

def forward_quest(
    initial: State,
    rules: RuleSet,
    cfg: ChainConfig,
    rng: random.Random | None = None,
) -> Quest:
    """Depth-first randomized search for a dependency chain of the exact length."""
    if cfg.quest_length < 1:
        raise ValueError("quest_length must be at least 1")
    rng = rng or random.Random(cfg.seed)
    budget = cfg.max_search_breadth
    path_states: list[State] = [initial]
    seen: set[State] = {initial}
    path_actions: list[GroundAction] = []

    def dfs() -> bool:
        nonlocal budget
        if len(path_actions) == cfg.quest_length:
            win = frozenset(path_actions[-1].produced)
            return not any(s.contains_all(win) for s in path_states[:-1])
        candidates = list(rules.admissible(path_states[-1]))
        if path_actions:
            candidates = [a for a in candidates if depends_on(a, path_actions[-1])]
        rng.shuffle(candidates)
        for action in candidates:
            budget -= 1
            if budget < 0:
                raise NoQuestFound(f"breadth bound {cfg.max_search_breadth} exhausted")
            nxt = apply_action(path_states[-1], action)
            if nxt in seen:
                continue
            path_states.append(nxt)
            seen.add(nxt)
            path_actions.append(action)
            if dfs():
                return True
            seen.discard(path_states.pop())
            path_actions.pop()
        return False

    if not dfs():
        raise NoQuestFound(f"no dependency chain of length {cfg.quest_length}")
    return Quest(tuple(path_actions), frozenset(path_actions[-1].produced))


# ---------------------------------------------------------------------------
# Backward chaining
# ---------------------------------------------------------------------------

@dataclass
class BackwardResult:
    initial: State
    quest: Quest
    created: list[EntityId]
    added_atoms: list[Atom]


_CREATABLE = ("f", "k", "c", "s")
_LOCATION_PREDS = ("at", "in", "on")
_STATUS_PREDS = ("open", "closed", "locked")


class _IdAllocator:
    def __init__(self, used: Iterable[str]):
        self.used = set(used)
        self.counters: dict[str, int] = {}

    def new(self, tag: str) -> EntityId:
        n = self.counters.get(tag, 0)
        while f"{tag}_{n}" in self.used:
            n += 1
        self.counters[tag] = n + 1
        self.used.add(f"{tag}_{n}")
        return EntityId(f"{tag}_{n}", tag)


def _entity_ids(state: State) -> set[str]:
    return {e.id for atom in state for e in atom.args}


def _can_add(atom: Atom, state: State, pending: Sequence[Atom], types: kb.TypeHierarchy) -> bool:
    """Whether an atom may be added to a pre-chain state without contradiction."""
    name = atom.predicate.name
    if name == "exit" or name == "eaten":
        return False
    if name == "at" and atom.args[0] == kb.PLAYER:
        return False
    if atom in state or atom in pending:
        return False
    subject = atom.args[0]
    if name in _LOCATION_PREDS:
        for other in list(state) + list(pending):
            if other.predicate.name in _LOCATION_PREDS and other.args[0] == subject:
                return False
    if name in _STATUS_PREDS:
        if kb.ATTR_OPENABLE not in types.attributes(subject.type_tag):
            return False
        for other in list(state) + list(pending):
            if other.predicate.name in _STATUS_PREDS and other.args[0] == subject:
                return False
    if name == "match":
        if kb.ATTR_LOCKABLE not in types.attributes(atom.args[1].type_tag):
            return False
    return True


def _consistent(state: State) -> bool:
    """Exclusivity sanity: one player position, one location/status per entity."""
    locations: dict[str, int] = {}
    statuses: dict[str, int] = {}
    player_at = 0
    for atom in state:
        if state.count(atom) > 1:
            return False
        name = atom.predicate.name
        if name == "at" and atom.args[0] == kb.PLAYER:
            player_at += 1
        elif name in _LOCATION_PREDS:
            key = atom.args[0].id
            locations[key] = locations.get(key, 0) + 1
            if locations[key] > 1:
                return False
        if name in _STATUS_PREDS:
            key = atom.args[0].id
            statuses[key] = statuses.get(key, 0) + 1
            if statuses[key] > 1:
                return False
    return player_at == 1


def _unify(pattern: PatternAtom, atom: Atom, binding: dict, types) -> dict | None:
    out = binding
    for term, arg in zip(pattern.args, atom.args):
        if isinstance(term, Variable):
            bound = out.get(term.name)
            if bound is None:
                if not types.conforms(arg, term.type_tag):
                    return None
                if out is binding:
                    out = dict(binding)
                out[term.name] = arg
            elif bound != arg:
                return None
        elif term != arg:
            return None
    return out


def _lenient_match(
    patterns: Sequence[PatternAtom],
    state: State,
    types: kb.TypeHierarchy,
    alloc: _IdAllocator,
    allow_creation: bool,
    binding: dict | None = None,
) -> Iterator[tuple[dict, list[Atom], list[EntityId]]]:
    """Bind patterns against the state, minting entities/atoms where allowed.

    Yields (binding, atoms to add, entities created).  Rooms, doors, the
    player and exits are never invented; added atoms must pass _can_add.
    """

    def instantiations(pattern: PatternAtom, bnd: dict) -> Iterator[tuple[dict, list[EntityId]]]:
        unbound = [t for t in pattern.args if isinstance(t, Variable) and t.name not in bnd]
        if not unbound:
            yield bnd, []
            return
        options: list[list[EntityId]] = []
        for var in unbound:
            tags = [t for t in types.concrete_subtypes(var.type_tag) if t in _CREATABLE]
            if not tags:
                return
            options.append([alloc_preview(tag) for tag in tags])
        # Creation is rare and shallow: at most one fresh entity per pattern
        # in the built-in rules, so a simple product is fine.
        for combo in itertools.product(*options):
            nb = dict(bnd)
            for var, ent in zip(unbound, combo):
                nb[var.name] = ent
            yield nb, list(combo)

    preview_cache: dict[str, EntityId] = {}

    def alloc_preview(tag: str) -> EntityId:
        # Stable preview ids so sibling candidates at one search node agree.
        if tag not in preview_cache:
            preview_cache[tag] = alloc.new(tag)
        return preview_cache[tag]

    def recurse(idx: int, bnd: dict, added: list[Atom], created: list[EntityId]) -> Iterator:
        if idx == len(patterns):
            yield bnd, added, created
            return
        pattern = patterns[idx]
        for atom in state.by_predicate(pattern.predicate.name):
            nxt = _unify(pattern, atom, bnd, types)
            if nxt is not None:
                yield from recurse(idx + 1, nxt, added, created)
        if allow_creation:
            for nb, fresh in instantiations(pattern, bnd):
                atom = pattern.substitute(nb)
                if _can_add(atom, state, added, types):
                    yield from recurse(idx + 1, nb, added + [atom], created + fresh)

    yield from recurse(0, dict(binding or {}), [], [])


@dataclass(slots=True)
class _Candidate:
    action: GroundAction
    pre_state: State
    added: list[Atom]
    created: list[EntityId]


def _final_candidates(
    rules: Iterable[RuleSchema],
    seed: State,
    types: kb.TypeHierarchy,
    alloc: _IdAllocator,
    allow_creation: bool,
) -> Iterator[_Candidate]:
    for rule in rules:
        patterns = [p.pattern for p in rule.lhs]
        for binding, added, created in _lenient_match(patterns, seed, types, alloc, allow_creation):
            if len(binding) != len(rule.params):
                continue
            action = rule.ground(binding)
            pre = State(tuple(seed.atoms) + tuple(added))
            if not pre.contains_all(action.consumed + action.required):
                continue
            if not _consistent(pre):
                continue
            yield _Candidate(action, pre, added, created)


def _prepend_candidates(
    rules: Iterable[RuleSchema],
    z: State,
    head: GroundAction,
    types: kb.TypeHierarchy,
    alloc: _IdAllocator,
    allow_creation: bool,
) -> Iterator[_Candidate]:
    """Predecessors of ``head``: exact unapplication against the pre-chain state.

    Consumed premises need no matching here: unapplying the rule puts them
    back into the synthesized earlier state, so only the persistent premises
    are bound leniently against ``z``.
    """
    for rule in rules:
        required_patterns = [p.pattern for p in rule.lhs if p.persistent]
        for binding0 in match_patterns(rule.rhs, z, types):
            for binding, added, created in _lenient_match(
                required_patterns, z, types, alloc, allow_creation, binding0
            ):
                if len(binding) != len(rule.params):
                    continue
                action = rule.ground(binding)
                if not depends_on(head, action):
                    continue
                if not z.contains_all(action.produced):
                    continue
                base = State(tuple(z.atoms) + tuple(added))
                try:
                    pre = base.replace(action.produced, action.consumed)
                except NotApplicable:
                    continue
                if not _consistent(pre):
                    continue
                yield _Candidate(action, pre, added, created)


def backward_quest(
    seed: State,
    rules: RuleSet,
    cfg: ChainConfig,
    rng: random.Random | None = None,
    goal_hint: str | None = None,
    final_rules: Sequence[str] | None = None,
    rule_weights: dict[str, float] | None = None,
) -> BackwardResult:
    """Build a quest last-action-first, synthesizing the initial state.

    ``goal_hint``/``final_rules`` restrict the final action's rule;
    ``rule_weights`` bias which rule the predecessors come from (weight 0
    excludes a rule).  Candidates within one rule are tiered so that
    groundings minting the fewest new facts are preferred.
    """
    if cfg.quest_length < 1:
        raise ValueError("quest_length must be at least 1")
    rng = rng or random.Random(cfg.seed)
    budget = cfg.max_search_breadth
    alloc = _IdAllocator(_entity_ids(seed))
    finals = list(final_rules) if final_rules else ([goal_hint] if goal_hint else None)
    if finals is not None:
        for name in finals:
            if name not in rules.rules:
                raise KeyError(f"unknown rule {name!r}")

    def chain_rules() -> list[RuleSchema]:
        out = []
        for rule in rules:
            if rule_weights is not None and rule_weights.get(rule.name, 0) <= 0:
                continue
            out.append(rule)
        return out

    def order_candidates(cands: list[_Candidate]) -> list[_Candidate]:
        groups: dict[str, list[_Candidate]] = {}
        for c in cands:
            groups.setdefault(c.action.rule.name, []).append(c)
        for name, group in groups.items():
            low = min(len(c.created) for c in group)
            groups[name] = [c for c in group if len(c.created) == low]
            rng.shuffle(groups[name])
        if rule_weights is None:
            flat = [c for group in groups.values() for c in group]
            rng.shuffle(flat)
            return flat
        names = sorted(groups)
        keyed = sorted(
            names,
            key=lambda n: rng.random() ** (1.0 / rule_weights.get(n, 1.0)),
            reverse=True,
        )
        return [c for n in keyed for c in groups[n]]

    def valid(cand: _Candidate, chain: list[GroundAction], win: frozenset[Atom]) -> bool:
        states = replay_states(cand.pre_state, [cand.action] + chain)
        if states is None or len(set(states)) != len(states):
            return False
        return not any(s.contains_all(win) for s in states[:-1])

    def dfs(
        z: State, chain: list[GroundAction], created: list[EntityId], added: list[Atom]
    ) -> tuple[State, list[GroundAction], list[EntityId], list[Atom]] | None:
        nonlocal budget
        if len(chain) == cfg.quest_length:
            return z, chain, created, added
        if chain:
            raw = list(
                _prepend_candidates(chain_rules(), z, chain[0], rules.types, alloc, cfg.allow_fact_creation)
            )
            win = frozenset(chain[-1].produced)
        else:
            pool = [rules[n] for n in finals] if finals else list(rules)
            raw = list(_final_candidates(pool, seed, rules.types, alloc, cfg.allow_fact_creation))
        for cand in order_candidates(raw):
            budget -= 1
            if budget < 0:
                raise NoQuestFound(f"breadth bound {cfg.max_search_breadth} exhausted")
            if not chain:
                win = frozenset(cand.action.produced)
            if not valid(cand, chain, win):
                continue
            result = dfs(
                cand.pre_state,
                [cand.action] + chain,
                created + cand.created,
                added + cand.added,
            )
            if result is not None:
                return result
        return None

    result = dfs(seed, [], [], [])
    if result is None:
        raise NoQuestFound(f"no backward chain of length {cfg.quest_length}")
    initial, chain, created, added = result
    quest = Quest(tuple(chain), frozenset(chain[-1].produced))
    return BackwardResult(initial, quest, created, added)
