"""Game assembly: worlds, quests and names composed into playable games."""
from __future__ import annotations

import math

from . import kb
from .engine import GameDefinition
from .kb import builtin_rules, core_rules
from .logic import Atom, EntityId, State
from .questgen import BackwardResult, ChainConfig, Quest, backward_quest, forward_quest
from .rng import derive_seed, stream
from .textgen import Name, NameTable, assign_names, load_theme
from .worldgen import WorldSpec, build_world, mini_world


def make_game(
    seed: int = 0,
    nb_rooms: int = 5,
    nb_objects: int = 8,
    quest_length: int = 3,
    theme: str = "house",
    with_doors: bool = False,
    direction: str = "forward",
    grid_size: int | None = None,
) -> GameDefinition:
    """Generate a complete game from one master seed.

    World layout, quest search and naming draw on independent derived
    streams, so the same world carries the same quest under every theme.
    """
    world_seed = derive_seed(seed, "world")
    quest_seed = derive_seed(seed, "quest")
    text_seed = derive_seed(seed, "text")
    if grid_size is None:
        grid_size = max(3, math.isqrt(max(nb_rooms - 1, 0)) + 2)
    spec = WorldSpec(
        nb_rooms=nb_rooms,
        grid_size=grid_size,
        with_doors=with_doors,
        nb_objects=nb_objects,
        seed=world_seed,
    )
    world = build_world(spec)
    rules = builtin_rules()
    entities = list(world.entities)
    # a handful of fresh search seeds before giving up on an awkward world
    last_error: NoQuestFound | None = None
    for attempt in range(8):
        attempt_seed = quest_seed if attempt == 0 else derive_seed(quest_seed, attempt)
        cfg = ChainConfig(
            quest_length=quest_length, direction=direction, seed=attempt_seed
        )
        try:
            if direction == "backward":
                res = backward_quest(
                    world.initial, rules, cfg, rng=stream(attempt_seed, "chain")
                )
                initial = res.initial
                quest = res.quest
                entities = list(world.entities) + res.created
            else:
                initial = world.initial
                quest = forward_quest(
                    world.initial, rules, cfg, rng=stream(attempt_seed, "chain")
                )
            break
        except NoQuestFound as err:
            last_error = err
    else:
        raise NoQuestFound(
            f"no quest of length {quest_length} found for seed {seed}: {last_error}"
        )
    names = assign_names(entities, initial, load_theme(theme), text_seed)
    metadata = {
        "rooms_xy": {r.id: list(world.graph.coords[r.id]) for r in world.graph.rooms},
        "welcome": "Welcome.",
        "nb_rooms": nb_rooms,
        "quest_length": quest_length,
    }
    return GameDefinition(
        rules=rules,
        initial=initial,
        quest=quest,
        names=names,
        theme=theme,
        entities=entities,
        seeds={"master": seed, "world": world_seed, "quest": quest_seed, "text": text_seed},
        metadata=metadata,
    )


def _literal_names(entities: list[EntityId]) -> NameTable:
    names = {
        kb.PLAYER.id: Name("you", bare=True),
        kb.INVENTORY.id: Name("inventory", bare=True),
    }
    for d in kb.DIRECTIONS:
        names[d] = Name(d, bare=True)
    for e in entities:
        names[e.id] = Name(e.id)
    return NameTable(names)


def mini_game() -> GameDefinition:
    """The one-room closed-fridge game: open it, take the apple, eat it."""
    world = mini_world(fridge_open=False)
    kitchen, fridge, table, apple = world.entities
    rules = core_rules()
    actions = (
        rules.ground("open/c", c=fridge, r=kitchen),
        rules.ground("take/c", o=apple, c=fridge, r=kitchen),
        rules.ground("eat", f=apple),
    )
    quest = Quest(actions, frozenset({Atom(kb.EATEN, (apple,))}))
    return GameDefinition(
        rules=rules,
        initial=world.initial,
        quest=quest,
        names=_literal_names(world.entities),
        theme="house",
        entities=world.entities,
        seeds={"master": 0, "world": 0, "quest": 0, "text": 0},
        metadata={
            "rooms_xy": {kitchen.id: [0, 0]},
            "welcome": "Welcome to the kitchen.",
            "preset": "mini",
        },
    )


def demo_game() -> GameDefinition:
    """A four-room tour: walk two rooms south, fetch a grape off the shelf,
    carry it west and set it on the bench."""
    hall = EntityId("hall", "r")
    stair = EntityId("stair", "r")
    cellar = EntityId("cellar", "r")
    vault = EntityId("vault", "r")
    shelf = EntityId("shelf", "s")
    bench = EntityId("bench", "s")
    grape = EntityId("grape", "f")
    south = kb.DIRECTIONS["south"]
    north = kb.DIRECTIONS["north"]
    west = kb.DIRECTIONS["west"]
    east = kb.DIRECTIONS["east"]
    atoms = [
        Atom(kb.AT, (kb.PLAYER, hall)),
        Atom(kb.EXIT, (hall, south, stair)),
        Atom(kb.EXIT, (stair, north, hall)),
        Atom(kb.EXIT, (stair, south, cellar)),
        Atom(kb.EXIT, (cellar, north, stair)),
        Atom(kb.EXIT, (cellar, west, vault)),
        Atom(kb.EXIT, (vault, east, cellar)),
        Atom(kb.AT, (shelf, cellar)),
        Atom(kb.AT, (bench, vault)),
        Atom(kb.ON, (grape, shelf)),
    ]
    rules = builtin_rules()
    actions = (
        rules.ground("go/free", r=hall, dir=south, r2=stair),
        rules.ground("go/free", r=stair, dir=south, r2=cellar),
        rules.ground("take/s", o=grape, s=shelf, r=cellar),
        rules.ground("go/free", r=cellar, dir=west, r2=vault),
        rules.ground("put", o=grape, s=bench, r=vault),
    )
    quest = Quest(actions, frozenset({Atom(kb.ON, (grape, bench))}))
    entities = [hall, stair, cellar, vault, shelf, bench, grape]
    names = _literal_names(entities)
    names.names.update(
        {
            "grape": Name("grape", "tiny"),
            "shelf": Name("shelf", "chipped"),
            "bench": Name("bench", "dusty"),
        }
    )
    return GameDefinition(
        rules=rules,
        initial=State(atoms),
        quest=quest,
        names=names,
        theme="house",
        entities=entities,
        seeds={"master": 0, "world": 0, "quest": 0, "text": 0},
        metadata={
            "rooms_xy": {"hall": [1, 2], "stair": [1, 1], "cellar": [1, 0], "vault": [0, 0]},
            "welcome": "Welcome to the cellars.",
            "preset": "demo",
        },
    )


PRESETS = {"mini": mini_game, "demo": demo_game}
