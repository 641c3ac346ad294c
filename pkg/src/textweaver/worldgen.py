"""Procedural world layout: random-walk room maps and object placement."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import kb
from .logic import Atom, EntityId, State

# Chance that an adjacent-but-unwalked room pair still gets connected.
P_LOOP = 0.5
# Chance that an exit carries a door / that a placed door starts closed.
P_DOOR = 0.5
P_DOOR_CLOSED = 0.5

_DELTAS = {"north": (0, 1), "south": (0, -1), "east": (1, 0), "west": (-1, 0)}


class GenerationFailed(Exception):
    """The generator exhausted its retry budget."""


@dataclass(frozen=True, slots=True)
class WorldSpec:
    nb_rooms: int = 5
    grid_size: int = 5
    with_doors: bool = False
    nb_objects: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.nb_rooms < 1:
            raise ValueError("nb_rooms must be at least 1")
        if self.grid_size < 1:
            raise ValueError("grid_size must be at least 1")
        if self.nb_rooms > self.grid_size * self.grid_size:
            raise ValueError("nb_rooms cannot exceed grid capacity")
        if self.nb_objects < 0:
            raise ValueError("nb_objects must be non-negative")


@dataclass(frozen=True, slots=True)
class Exit:
    """One side of a passage; reciprocal sides are stored explicitly."""

    room: EntityId
    direction: str
    dest: EntityId
    door: EntityId | None = None


@dataclass
class MapGraph:
    rooms: list[EntityId]
    coords: dict[str, tuple[int, int]]
    exits: list[Exit]
    doors: list[EntityId] = field(default_factory=list)

    def exits_from(self, room: EntityId) -> list[Exit]:
        return [e for e in self.exits if e.room == room]

    def connected(self) -> bool:
        if not self.rooms:
            return False
        seen = {self.rooms[0].id}
        frontier = [self.rooms[0]]
        while frontier:
            room = frontier.pop()
            for e in self.exits_from(room):
                if e.dest.id not in seen:
                    seen.add(e.dest.id)
                    frontier.append(e.dest)
        return len(seen) == len(self.rooms)


def _direction_between(a: tuple[int, int], b: tuple[int, int]) -> str:
    dx, dy = b[0] - a[0], b[1] - a[1]
    for name, (ex, ey) in _DELTAS.items():
        if (dx, dy) == (ex, ey):
            return name
    raise ValueError(f"cells {a} and {b} are not adjacent")


def generate_map(spec: WorldSpec, rng: random.Random | None = None) -> MapGraph:
    """Random-walk a grid until ``nb_rooms`` distinct cells are visited.

    Revisits are allowed but only the first visit creates a room.  Every
    walked transition becomes an exit; adjacent visited pairs that were never
    walked are connected with probability P_LOOP.  Exits are reciprocal.
    """
    spec.validate()
    rng = rng or random.Random(spec.seed)
    for _ in range(20):
        graph = _try_walk(spec, rng)
        if graph is not None:
            return graph
    raise GenerationFailed(f"no layout for {spec} after 20 attempts")


def _try_walk(spec: WorldSpec, rng: random.Random) -> MapGraph | None:
    g = spec.grid_size
    start = (g // 2, g // 2)
    cells: dict[tuple[int, int], int] = {start: 0}
    walked: set[frozenset] = set()
    pos = start
    budget = 400 * spec.nb_rooms
    while len(cells) < spec.nb_rooms and budget > 0:
        budget -= 1
        dx, dy = _DELTAS[rng.choice(("north", "south", "east", "west"))]
        nxt = (pos[0] + dx, pos[1] + dy)
        if not (0 <= nxt[0] < g and 0 <= nxt[1] < g):
            continue
        if nxt not in cells:
            cells[nxt] = len(cells)
        walked.add(frozenset((pos, nxt)))
        pos = nxt
    if len(cells) < spec.nb_rooms:
        return None

    rooms = [EntityId(f"r_{i}", "r") for i in range(len(cells))]
    by_cell = {cell: rooms[i] for cell, i in cells.items()}
    pairs = sorted(
        (tuple(sorted(p)) for p in walked),
        key=lambda p: (cells[p[0]], cells[p[1]]),
    )
    # Unwalked adjacencies considered in deterministic cell order.
    for cell, idx in sorted(cells.items(), key=lambda kv: kv[1]):
        for dx, dy in _DELTAS.values():
            other = (cell[0] + dx, cell[1] + dy)
            if other in cells and cells[other] > idx:
                key = tuple(sorted((cell, other)))
                if key not in {tuple(p) for p in pairs} and rng.random() < P_LOOP:
                    pairs.append(key)

    coords = {by_cell[cell].id: cell for cell in cells}
    exits: list[Exit] = []
    doors: list[EntityId] = []
    for a, b in pairs:
        door = None
        if spec.with_doors and rng.random() < P_DOOR:
            door = EntityId(f"d_{len(doors)}", "d")
            doors.append(door)
        d_ab = _direction_between(a, b)
        exits.append(Exit(by_cell[a], d_ab, by_cell[b], door))
        exits.append(Exit(by_cell[b], kb.OPPOSITE[d_ab], by_cell[a], door))
    return MapGraph(rooms, coords, exits, doors)


def map_atoms(graph: MapGraph, door_states: dict[str, str] | None = None) -> list[Atom]:
    """Exit and door-status atoms for a map.

    ``door_states`` maps door id to open/closed/locked; unlisted doors are open.
    """
    door_states = door_states or {}
    atoms: list[Atom] = []
    for e in graph.exits:
        if e.door is None:
            atoms.append(Atom(kb.EXIT, (e.room, kb.DIRECTIONS[e.direction], e.dest)))
        else:
            atoms.append(Atom(kb.DOOR_EXIT, (e.room, kb.DIRECTIONS[e.direction], e.dest, e.door)))
    status = {"open": kb.OPEN, "closed": kb.CLOSED, "locked": kb.LOCKED}
    for door in graph.doors:
        pred = status[door_states.get(door.id, "open")]
        atoms.append(Atom(pred, (door,)))
    return atoms


DEFAULT_TYPE_MIX = {"c": 0.2, "s": 0.2, "f": 0.4, "k": 0.2}


def place_objects(
    graph: MapGraph,
    nb_objects: int,
    rng: random.Random,
    type_mix: dict[str, float] | None = None,
    door_states: dict[str, str] | None = None,
) -> tuple[State, list[EntityId]]:
    """Initial state for a map: player at the first room, objects uniform.

    Portable objects land on the floor, inside a container or on a supporter
    of their room, each slot equally likely; fixed furniture gets a location
    atom and containers an open/closed status.
    """
    atoms = map_atoms(graph, door_states)
    atoms.append(Atom(kb.AT, (kb.PLAYER, graph.rooms[0])))
    objects: list[EntityId] = []
    counts: dict[str, int] = {}
    mix = type_mix or DEFAULT_TYPE_MIX
    tags = sorted(mix)
    weights = [mix[t] for t in tags]
    furniture: dict[str, list[EntityId]] = {r.id: [] for r in graph.rooms}
    for _ in range(nb_objects):
        tag = rng.choices(tags, weights)[0]
        n = counts.get(tag, 0)
        counts[tag] = n + 1
        entity = EntityId(f"{tag}_{n}", tag)
        objects.append(entity)
        room = rng.choice(graph.rooms)
        if tag in ("c", "s"):
            atoms.append(Atom(kb.AT, (entity, room)))
            if tag == "c":
                pred = kb.OPEN if rng.random() < 0.5 else kb.CLOSED
                atoms.append(Atom(pred, (entity,)))
            furniture[room.id].append(entity)
        else:
            slots: list[Atom] = [Atom(kb.AT, (entity, room))]
            for holder in furniture[room.id]:
                if holder.type_tag == "c":
                    slots.append(Atom(kb.IN, (entity, holder)))
                else:
                    slots.append(Atom(kb.ON, (entity, holder)))
            atoms.append(rng.choice(slots))
    return State(atoms), objects


@dataclass
class World:
    """A generated map with its initial state and every named entity."""

    graph: MapGraph
    initial: State
    entities: list[EntityId]  # rooms + doors + objects, in creation order


def build_world(spec: WorldSpec, door_states: dict[str, str] | None = None) -> World:
    rng = random.Random(spec.seed)
    graph = generate_map(spec, rng)
    state, objects = place_objects(graph, spec.nb_objects, rng, door_states=door_states)
    return World(graph, state, list(graph.rooms) + list(graph.doors) + objects)


def mini_world(fridge_open: bool = True) -> World:
    """The one-room worked example: fridge and table, apple in the fridge."""
    kitchen = EntityId("kitchen", "r")
    fridge = EntityId("fridge", "c")
    table = EntityId("table", "s")
    apple = EntityId("apple", "f")
    atoms = [
        Atom(kb.AT, (fridge, kitchen)),
        Atom(kb.AT, (table, kitchen)),
        Atom(kb.IN, (apple, fridge)),
        Atom(kb.OPEN if fridge_open else kb.CLOSED, (fridge,)),
        Atom(kb.AT, (kb.PLAYER, kitchen)),
    ]
    graph = MapGraph([kitchen], {kitchen.id: (0, 0)}, [], [])
    return World(graph, State(atoms), [kitchen, fridge, table, apple])
