"""HTTP/WebSocket session service for remote play.

Sessions are created and listed over HTTP; stepping happens over a
per-session WebSocket so terminal events can be pushed. See protocol.md
at the repository root for the wire format.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import asdict, dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from . import kb
from .bench import make_treasure_hunter
from .engine import CorruptFile, EpisodeOver, VersionMismatch, game_from_doc
from .env import Env, EnvConfig, Observation
from .gamegen import PRESETS, make_game
from .logic import Atom, State

PROTOCOL_VERSION = 1
DEFAULT_TTL_SECONDS = 3600.0
DEFAULT_MAX_SESSIONS = 64

_CONFIG_FLAGS = (
    "objective",
    "admissible_commands",
    "intermediate_reward",
    "winning_policy",
    "full_state",
)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={
            "protocol_version": PROTOCOL_VERSION,
            "error": {"code": code, "message": message},
        },
    )


def observation_doc(obs: Observation) -> dict:
    """Wire form of an observation: gated (None) fields are omitted."""
    doc = {k: v for k, v in asdict(obs).items() if v is not None}
    for always in ("done", "won", "lost", "score", "moves"):
        doc[always] = getattr(obs, always)
    return doc


@dataclass
class SessionHandle:
    session_id: str
    env: Env
    debug: bool
    created_at: float
    last_active: float
    last_observation: Observation
    lock: threading.Lock = field(default_factory=threading.Lock)

    def touch(self) -> None:
        self.last_active = time.time()

    def summary(self) -> dict:
        session = self.env.session
        return {
            "session_id": self.session_id,
            "created_at": self.created_at,
            "last_active": self.last_active,
            "done": session.done,
            "outcome": session.outcome,
            "score": session.score,
            "moves": session.moves,
            "debug": self.debug,
        }


class SessionRegistry:
    """Thread-safe id -> handle map with TTL expiry and a session quota."""

    def __init__(self, max_sessions: int, ttl_seconds: float):
        self.max_sessions = max_sessions
        self.ttl_seconds = ttl_seconds
        self._lock = threading.Lock()
        self._handles: dict[str, SessionHandle] = {}

    def _purge_expired(self) -> None:
        now = time.time()
        dead = [
            sid
            for sid, h in self._handles.items()
            if now - h.last_active > self.ttl_seconds
        ]
        for sid in dead:
            del self._handles[sid]

    def add(self, handle: SessionHandle) -> None:
        with self._lock:
            self._purge_expired()
            if len(self._handles) >= self.max_sessions:
                raise QuotaExceeded(
                    f"session quota of {self.max_sessions} reached"
                )
            self._handles[handle.session_id] = handle

    def get(self, session_id: str) -> SessionHandle | None:
        with self._lock:
            self._purge_expired()
            return self._handles.get(session_id)

    def remove(self, session_id: str) -> bool:
        with self._lock:
            return self._handles.pop(session_id, None) is not None

    def list(self) -> list[dict]:
        with self._lock:
            self._purge_expired()
            return [h.summary() for h in self._handles.values()]


class QuotaExceeded(Exception):
    pass


def _build_game(payload: dict):
    if "game" in payload:
        doc = payload["game"]
        if not isinstance(doc, dict):
            raise ValueError("game must be a JSON object")
        return game_from_doc(doc)
    if "preset" in payload:
        name = payload["preset"]
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}")
        return PRESETS[name]()
    if "level" in payload:
        return make_treasure_hunter(
            int(payload["level"]), seed=int(payload.get("seed", 0))
        )
    if "rooms" in payload:
        return make_game(
            seed=int(payload.get("seed", 0)),
            nb_rooms=int(payload["rooms"]),
            nb_objects=int(payload.get("objects", 8)),
            quest_length=int(payload.get("quest_length", 3)),
            theme=payload.get("theme", "house"),
            with_doors=bool(payload.get("doors", False)),
        )
    raise ValueError("specify one of: game, preset, level, rooms")


def _build_config(payload: dict) -> EnvConfig:
    raw = payload.get("config", {})
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    kwargs = {flag: bool(raw[flag]) for flag in _CONFIG_FLAGS if flag in raw}
    mode = raw.get("mode", "parser")
    return EnvConfig(mode=mode, **kwargs)


def _room_of(state: State, entity) -> str | None:
    """The room an entity sits in, hopping through containers/supporters."""
    here = {a.args[0].id: a.args[1] for a in state.by_predicate("at")}
    inside = {a.args[0].id: a.args[1] for a in state.by_predicate("in")}
    atop = {a.args[0].id: a.args[1] for a in state.by_predicate("on")}
    cursor = entity
    for _ in range(8):
        if cursor.id in here:
            spot = here[cursor.id]
            return spot.id if spot.type_tag == "r" else None
        cursor = inside.get(cursor.id) or atop.get(cursor.id)
        if cursor is None or cursor.id == kb.INVENTORY.id:
            return None
    return None


def map_snapshot(handle: SessionHandle) -> dict:
    """Current-state graph document for the viewer."""
    session = handle.env.session
    game = session.game
    state = session.state
    coords = game.metadata.get("rooms_xy", {})
    names = game.names

    def display(eid: str) -> str:
        return names[eid].display if eid in names else eid

    rooms = []
    for e in game.entities:
        if e.type_tag != "r":
            continue
        xy = coords.get(e.id)
        rooms.append(
            {
                "id": e.id,
                "name": display(e.id),
                "x": xy[0] if xy else None,
                "y": xy[1] if xy else None,
            }
        )
    exits = []
    for atom in state.by_predicate("exit"):
        door = None
        if atom.predicate.arity == 4:
            d = atom.args[3]
            if Atom(kb.LOCKED, (d,)) in state:
                door_state = "locked"
            elif Atom(kb.CLOSED, (d,)) in state:
                door_state = "closed"
            else:
                door_state = "open"
            door = {"id": d.id, "name": display(d.id), "state": door_state}
        exits.append(
            {
                "from": atom.args[0].id,
                "dir": atom.args[1].id,
                "to": atom.args[2].id,
                "door": door,
            }
        )
    objects = []
    inside = {a.args[0].id: a.args[1].id for a in state.by_predicate("in")}
    atop = {a.args[0].id: a.args[1].id for a in state.by_predicate("on")}
    here = {a.args[0].id: a.args[1].id for a in state.by_predicate("at")}
    for e in game.entities:
        if e.type_tag in ("r", "d"):
            continue
        holder = inside.get(e.id) or atop.get(e.id) or here.get(e.id)
        objects.append(
            {
                "id": e.id,
                "name": display(e.id),
                "type": e.type_tag,
                "holder": holder,
                "room": _room_of(state, e),
            }
        )
    player_room = next(
        a.args[1].id for a in state.by_predicate("at") if a.args[0] == kb.PLAYER
    )
    target = game.metadata.get("target")
    target_entity = next((e for e in game.entities if e.id == target), None)
    return {
        "protocol_version": PROTOCOL_VERSION,
        "rooms": rooms,
        "exits": exits,
        "objects": objects,
        "player_room": player_room,
        "target": target,
        "target_room": _room_of(state, target_entity) if target_entity else None,
    }


def build_app(
    debug: bool = False,
    max_sessions: int = DEFAULT_MAX_SESSIONS,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
) -> FastAPI:
    app = FastAPI(title="textweaver session service")
    registry = SessionRegistry(max_sessions, ttl_seconds)
    app.state.registry = registry
    app.state.debug = debug

    @app.post("/sessions")
    async def create_session(payload: dict):
        try:
            game = _build_game(payload)
            config = _build_config(payload)
        except (ValueError, KeyError, TypeError, VersionMismatch, CorruptFile) as err:
            return _error(400, "invalid_game", str(err))
        env = Env(game, config)
        obs = env.reset()
        handle = SessionHandle(
            session_id=uuid.uuid4().hex,
            env=env,
            debug=bool(payload.get("debug", False)) or debug or config.full_state,
            created_at=time.time(),
            last_active=time.time(),
            last_observation=obs,
        )
        try:
            registry.add(handle)
        except QuotaExceeded as err:
            return _error(429, "quota_exceeded", str(err))
        return {
            "protocol_version": PROTOCOL_VERSION,
            "session_id": handle.session_id,
            "observation": observation_doc(obs),
        }

    @app.get("/sessions")
    async def list_sessions():
        return {"protocol_version": PROTOCOL_VERSION, "sessions": registry.list()}

    @app.delete("/sessions/{session_id}")
    async def destroy_session(session_id: str):
        if not registry.remove(session_id):
            return _error(404, "unknown_session", f"no session {session_id!r}")
        return {"protocol_version": PROTOCOL_VERSION, "destroyed": session_id}

    @app.get("/sessions/{session_id}/map")
    async def session_map(session_id: str):
        handle = registry.get(session_id)
        if handle is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        if not handle.debug:
            return _error(
                403,
                "observability_denied",
                "map requires a debug or full_state session",
            )
        with handle.lock:
            handle.touch()
            return map_snapshot(handle)

    @app.websocket("/sessions/{session_id}/play")
    async def play_channel(ws: WebSocket, session_id: str):
        await ws.accept()
        handle = registry.get(session_id)
        if handle is None:
            await ws.send_json(
                {
                    "protocol_version": PROTOCOL_VERSION,
                    "kind": "error",
                    "code": "unknown_session",
                    "message": f"no session {session_id!r}",
                }
            )
            await ws.close()
            return
        try:
            while True:
                message = await ws.receive_json()
                reply = _handle_message(handle, message)
                await ws.send_json(reply)
                if reply.get("kind") == "result" and reply["done"]:
                    await ws.send_json(
                        {
                            "protocol_version": PROTOCOL_VERSION,
                            "kind": "event",
                            "event": "game_over",
                            "session_id": handle.session_id,
                            "outcome": handle.env.session.outcome,
                        }
                    )
        except WebSocketDisconnect:
            return

    return app


def _handle_message(handle: SessionHandle, message: dict) -> dict:
    correlation_id = message.get("correlation_id")

    def err(code: str, text: str) -> dict:
        return {
            "protocol_version": PROTOCOL_VERSION,
            "kind": "error",
            "code": code,
            "message": text,
            "correlation_id": correlation_id,
        }

    kind = message.get("kind")
    if kind == "state":
        with handle.lock:
            handle.touch()
            return {
                "protocol_version": PROTOCOL_VERSION,
                "kind": "result",
                "correlation_id": correlation_id,
                "observation": observation_doc(handle.last_observation),
                "reward": 0,
                "done": handle.env.session.done,
            }
    if kind != "step":
        return err("unknown_kind", f"unsupported message kind {kind!r}")
    if "input" not in message:
        return err("bad_request", "step requires an input field")
    raw = message["input"]
    with handle.lock:
        handle.touch()
        try:
            if isinstance(raw, bool) or not isinstance(raw, (str, int)):
                return err("bad_request", "input must be a string or an index")
            if isinstance(raw, int):
                obs, reward, done = handle.env.step_choice(raw)
            else:
                obs, reward, done = handle.env.step(raw)
        except EpisodeOver:
            return err("session_finished", "the episode is over")
        except (ValueError, IndexError) as exc:
            return err("bad_request", str(exc))
        handle.last_observation = obs
    return {
        "protocol_version": PROTOCOL_VERSION,
        "kind": "result",
        "correlation_id": correlation_id,
        "observation": observation_doc(obs),
        "reward": reward,
        "done": done,
    }


app = build_app()
