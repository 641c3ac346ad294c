"""Whole-game assembly: determinism, themes, and the bundled presets."""
from __future__ import annotations

import pytest

from textweaver.engine import Session, dumps_game, game_to_doc
from textweaver.gamegen import PRESETS, demo_game, make_game, mini_game
from textweaver.questgen import quest_is_valid


def test_make_game_deterministic():
    a = make_game(seed=12, nb_rooms=5, nb_objects=6, quest_length=3)
    b = make_game(seed=12, nb_rooms=5, nb_objects=6, quest_length=3)
    assert dumps_game(a) == dumps_game(b)
    c = make_game(seed=13, nb_rooms=5, nb_objects=6, quest_length=3)
    assert dumps_game(c) != dumps_game(a)


def test_themes_share_logic_differ_in_text():
    house = make_game(seed=3, nb_rooms=4, nb_objects=5, quest_length=3, theme="house")
    basic = make_game(seed=3, nb_rooms=4, nb_objects=5, quest_length=3, theme="basic")
    da, db = game_to_doc(house), game_to_doc(basic)
    assert da["initial"] == db["initial"]
    assert da["quest"] == db["quest"]
    assert da["names"] != db["names"]


def test_directions_produce_valid_quests():
    for direction in ("forward", "backward"):
        game = make_game(
            seed=2, nb_rooms=4, nb_objects=4, quest_length=3, direction=direction
        )
        assert len(game.quest.actions) == 3
        assert quest_is_valid(game.initial, game.quest)


def test_backward_created_entities_are_registered():
    game = make_game(seed=5, nb_rooms=3, nb_objects=0, quest_length=3,
                     direction="backward")
    ids = {e.id for e in game.entities}
    for atom in game.initial.atoms:
        for arg in atom.args:
            if arg.type_tag not in ("p", "i", "dir"):
                assert arg.id in ids, atom.encode()


def test_seeds_recorded_for_provenance():
    game = make_game(seed=42, nb_rooms=3, nb_objects=2, quest_length=2)
    assert game.seeds["master"] == 42
    assert {"world", "quest", "text"} <= set(game.seeds)


def test_quest_length_honored_across_sizes():
    for ql in (1, 2, 4):
        game = make_game(seed=8, nb_rooms=4, nb_objects=6, quest_length=ql)
        assert len(game.quest.actions) == ql


def test_unknown_theme_rejected():
    with pytest.raises(Exception):
        make_game(seed=0, nb_rooms=3, nb_objects=2, quest_length=2, theme="space")


def test_presets_play_to_win():
    assert set(PRESETS) == {"mini", "demo"}
    for name, factory in PRESETS.items():
        game = factory()
        session = Session(game)
        session.reset()
        while not session.done:
            session.follow_policy_step()
        assert session.outcome == "won", name


def test_mini_matches_fixture_world():
    game = mini_game()
    assert game.metadata["preset"] == "mini"
    assert [a.rule.name for a in game.quest.actions] == ["open/c", "take/c", "eat"]


def test_demo_map_coordinates_cover_rooms():
    game = demo_game()
    rooms = {e.id for e in game.entities if e.type_tag == "r"}
    assert set(game.metadata["rooms_xy"]) == rooms
