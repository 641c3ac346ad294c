"""Type hierarchy, rule text codec and rule-set validation."""
from __future__ import annotations

import pytest

from textweaver import kb
from textweaver.kb import (
    CORE_RULE_TEXT,
    EXTENSION_RULE_TEXT,
    RuleSyntaxError,
    builtin_rules,
    core_rules,
    encode_rule,
    parse_rule,
    validate,
)
from textweaver.logic import Atom, EntityId


def test_type_tree_membership():
    t = kb.TYPES
    assert t.is_a("f", "o")
    assert t.is_a("k", "o")
    assert t.is_a("c", "h")
    assert t.is_a("i", "h")
    assert t.is_a("f", "t")
    assert not t.is_a("o", "f")
    assert not t.is_a("c", "s")


def test_type_attributes():
    t = kb.TYPES
    assert kb.ATTR_EDIBLE in t.attributes("f")
    assert kb.ATTR_PORTABLE in t.attributes("f")  # edible implies portable
    assert kb.ATTR_LOCKABLE in t.attributes("c")
    assert kb.ATTR_OPENABLE in t.attributes("c")  # lockable implies openable
    assert kb.ATTR_FIXED in t.attributes("s")
    assert kb.ATTR_PORTABLE not in t.attributes("s")


def test_conforms_follows_subtyping():
    apple = EntityId("apple", "f")
    shelf = EntityId("shelf", "s")
    assert kb.TYPES.conforms(apple, "o")
    assert kb.TYPES.conforms(apple, "f")
    assert not kb.TYPES.conforms(apple, "k")
    assert not kb.TYPES.conforms(shelf, "o")


def test_cycle_and_unknown_parent_rejected():
    with pytest.raises(ValueError):
        kb.TypeHierarchy([
            kb.EntityTypeDef("a", frozenset(), "b"),
            kb.EntityTypeDef("b", frozenset(), "a"),
        ])
    with pytest.raises(ValueError):
        kb.TypeHierarchy([kb.EntityTypeDef("a", frozenset(), "nope")])


def test_rule_lines_round_trip():
    for line in CORE_RULE_TEXT + EXTENSION_RULE_TEXT:
        assert encode_rule(parse_rule(line)) == line


def test_parse_rule_structure():
    rule = parse_rule(CORE_RULE_TEXT[0])
    assert rule.name == "open/c"
    assert rule.verb == "open"
    assert [v.name for v in rule.params] == ["c", "r"]
    assert [p.persistent for p in rule.lhs] == [True, True, False]
    assert rule.lhs[-1].pattern.predicate.name == "closed"
    assert rule.rhs[0].predicate.name == "open"
    assert rule.command_template == "open {c}"


def test_parse_rule_rejects_garbage():
    with pytest.raises(RuleSyntaxError):
        parse_rule("just some text")
    with pytest.raises(RuleSyntaxError):
        parse_rule("x :: a:t :: foo(a) -> :: x {a}")
    with pytest.raises(RuleSyntaxError):
        parse_rule("x :: a:t :: undeclared(b) -> foo(a) :: x {a}")


def test_exit_predicate_two_arities():
    assert kb.predicate("exit", 3) is kb.EXIT
    assert kb.predicate("exit", 4) is kb.DOOR_EXIT
    with pytest.raises(RuleSyntaxError):
        kb.predicate("exit", 5)


def test_core_set_has_seven_rules_builtin_seventeen():
    assert len(core_rules().rules) == 7
    assert len(builtin_rules().rules) == 17


def test_validate_builtin_clean():
    assert validate(builtin_rules()) == []
    assert validate(core_rules()) == []


def test_undeclared_rhs_variable_rejected_at_parse():
    with pytest.raises(RuleSyntaxError):
        parse_rule("bogus :: o:o :: in(o, I) -> eaten(f) :: bogus {o}")


def test_validate_flags_type_misuse():
    rs = builtin_rules()
    rule = parse_rule("weird :: s:s :: $at(s, s) & open(s) -> closed(s) :: weird {s}")
    rs.rules["weird"] = rule
    problems = validate(rs)
    assert any("weird" in p for p in problems)
    del rs.rules["weird"]


def test_validate_flags_broken_reciprocal():
    rs = builtin_rules()
    rs.reciprocal_map["eat"] = "open/c"
    problems = validate(rs)
    assert any("eat" in p for p in problems)


def test_reciprocal_action_inverts_go():
    rs = builtin_rules()
    r0, r1 = EntityId("r_0", "r"), EntityId("r_1", "r")
    go = rs.ground("go/free", r=r0, dir=kb.DIRECTIONS["north"], r2=r1)
    back = rs.reciprocal_action(go)
    assert back.rule.name == "go/free"
    assert back.binding["r"] == r1
    assert back.binding["r2"] == r0
    assert back.binding["dir"].id == "south"


def test_reciprocal_action_none_for_eat():
    rs = builtin_rules()
    eat = rs.ground("eat", f=EntityId("apple", "f"))
    assert rs.reciprocal_action(eat) is None


def test_unlock_needs_matching_key():
    rs = builtin_rules()
    room = EntityId("hall", "r")
    chest = EntityId("chest", "c")
    key = EntityId("key1", "k")
    wrong = EntityId("key2", "k")
    from textweaver.logic import State

    state = State([
        Atom(kb.AT, (kb.PLAYER, room)),
        Atom(kb.AT, (chest, room)),
        Atom(kb.LOCKED, (chest,)),
        Atom(kb.IN, (key, kb.INVENTORY)),
        Atom(kb.IN, (wrong, kb.INVENTORY)),
        Atom(kb.MATCH, (key, chest)),
    ])
    acts = [a.encode() for a in rs.admissible(state)]
    assert "unlock(chest, key1)" in acts
    assert "unlock(chest, key2)" not in acts


def test_rule_listing_round_trip():
    rs = builtin_rules()
    doc = rs.encode_listing()
    clone = kb.RuleSet.from_listing(doc)
    assert set(clone.rules) == set(rs.rules)
    for name in rs.rules:
        assert encode_rule(clone.rules[name]) == encode_rule(rs.rules[name])
    assert clone.reciprocal_map == rs.reciprocal_map


def test_listing_rejects_unknown_format():
    doc = builtin_rules().encode_listing()
    doc["format_version"] = 99
    with pytest.raises(RuleSyntaxError):
        kb.RuleSet.from_listing(doc)
