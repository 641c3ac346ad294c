"""State, matching, grounding and reachability against brute-force oracles."""
from __future__ import annotations

import random

import pytest

from textweaver import kb
from textweaver.kb import builtin_rules, core_rules
from textweaver.logic import (
    Atom,
    EntityId,
    NotApplicable,
    State,
    apply_action,
    enumerate_reachable,
)
from textweaver.worldgen import WorldSpec, build_world, mini_world

from .oracles import brute_admissible, brute_reachable

KITCHEN = EntityId("kitchen", "r")
FRIDGE = EntityId("fridge", "c")
TABLE = EntityId("table", "s")
APPLE = EntityId("apple", "f")


def encode_all(actions):
    return sorted(a.encode() for a in actions)


def test_state_canonical_order_and_equality():
    a = Atom(kb.AT, (FRIDGE, KITCHEN))
    b = Atom(kb.IN, (APPLE, FRIDGE))
    assert State([a, b]) == State([b, a])
    assert hash(State([a, b])) == hash(State([b, a]))
    assert State([a, b]) != State([a])


def test_state_is_a_multiset():
    a = Atom(kb.OPEN, (FRIDGE,))
    one = State([a])
    two = State([a, a])
    assert one != two
    assert two.count(a) == 2
    assert two.contains_all([a, a])
    assert not one.contains_all([a, a])


def test_atom_arity_checked():
    with pytest.raises(ValueError):
        Atom(kb.AT, (FRIDGE,))


def test_replace_missing_atom_raises():
    state = State([Atom(kb.OPEN, (FRIDGE,))])
    with pytest.raises(NotApplicable):
        state.replace([Atom(kb.CLOSED, (FRIDGE,))], [])


def test_encode_forms():
    atom = Atom(kb.IN, (APPLE, FRIDGE))
    assert atom.encode() == "in(apple,fridge)"
    state = State([atom, Atom(kb.AT, (kb.PLAYER, KITCHEN))])
    assert state.encode() == "at(P,kitchen)\nin(apple,fridge)"


def test_mini_world_admissible_exactly_two():
    w = mini_world()
    acts = core_rules().admissible(w.initial)
    assert encode_all(acts) == ["close(fridge)", "take(apple, fridge)"]


def test_mini_world_admissible_same_under_extensions():
    # Navigation and floor rules ground nothing in the one-room start state.
    w = mini_world()
    acts = builtin_rules().admissible(w.initial)
    assert encode_all(acts) == ["close(fridge)", "take(apple, fridge)"]


def test_after_take_admissible():
    w = mini_world()
    rules = core_rules()
    take = rules.ground("take/c", o=APPLE, c=FRIDGE, r=KITCHEN)
    state = apply_action(w.initial, take)
    assert encode_all(rules.admissible(state)) == [
        "close(fridge)",
        "eat(apple)",
        "insert(apple, fridge)",
        "put(apple, table)",
    ]


def test_eat_requires_inventory():
    w = mini_world()
    eat = core_rules().ground("eat", f=APPLE)
    with pytest.raises(NotApplicable):
        apply_action(w.initial, eat)


def test_persistent_premise_not_consumed():
    w = mini_world()
    rules = core_rules()
    take = rules.ground("take/c", o=APPLE, c=FRIDGE, r=KITCHEN)
    state = apply_action(w.initial, take)
    assert Atom(kb.OPEN, (FRIDGE,)) in state
    assert Atom(kb.AT, (FRIDGE, KITCHEN)) in state
    assert Atom(kb.IN, (APPLE, kb.INVENTORY)) in state
    assert Atom(kb.IN, (APPLE, FRIDGE)) not in state


def test_admissible_matches_bruteforce_on_mini_world():
    rules = core_rules()
    w = mini_world()
    fast = rules.admissible(w.initial)
    slow = brute_admissible(w.initial, list(rules), rules.types)
    assert list(fast) == slow


def test_admissible_matches_bruteforce_on_generated_worlds():
    rules = builtin_rules()
    for seed in range(6):
        w = build_world(WorldSpec(nb_rooms=4, grid_size=4, nb_objects=5, seed=seed))
        fast = rules.admissible(w.initial)
        slow = brute_admissible(w.initial, list(rules), rules.types)
        assert list(fast) == slow, f"seed {seed}"


def test_mini_world_reachable_eight_states():
    # fridge open/closed x apple in-fridge/held/on-table/eaten
    rules = core_rules()
    graph = enumerate_reachable(mini_world().initial, list(rules), rules.types)
    assert not graph.truncated
    assert len(graph.states) == 8
    slow = brute_reachable(mini_world().initial, list(rules), rules.types)
    assert set(graph.states) == slow


def test_reachable_respects_state_limit():
    rules = core_rules()
    graph = enumerate_reachable(mini_world().initial, list(rules), rules.types, state_limit=3)
    assert graph.truncated
    assert len(graph.states) == 3
    for src, _, dst in graph.edges:
        assert src < 3 and dst < 3


def test_apply_is_deterministic_and_frame_preserving():
    rules = builtin_rules()
    rng = random.Random(7)
    w = build_world(WorldSpec(nb_rooms=4, grid_size=4, nb_objects=6, seed=3))
    state = w.initial
    for _ in range(60):
        acts = rules.admissible(state)
        if not acts:
            break
        action = rng.choice(acts)
        nxt = apply_action(state, action)
        assert apply_action(state, action) == nxt
        # frame: untouched atoms survive
        touched = set(action.consumed) | set(action.produced)
        for atom in state:
            if atom not in touched:
                assert atom in nxt
        state = nxt


def test_reversible_actions_restore_state():
    rules = builtin_rules()
    rng = random.Random(11)
    w = build_world(WorldSpec(nb_rooms=4, grid_size=4, nb_objects=6, seed=5))
    state = w.initial
    for _ in range(40):
        acts = rules.admissible(state)
        if not acts:
            break
        action = rng.choice(acts)
        nxt = apply_action(state, action)
        back = rules.reciprocal_action(action)
        if back is not None:
            assert apply_action(nxt, back) == state
        state = nxt
