"""HTTP session host for live games.

The server owns no clock: clients post tick whenever their timer fires, so
a recorded trace of requests replays to the identical game. Commands within
one session are serialized under its lock; sessions never share state.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .game import (
    GameConfig,
    World,
    config_from_json,
    draw_world,
    game_over,
    handle_key,
    initial_world,
    tick,
    world_to_json,
)
from .rng import Rng
from .values import scene_to_json

DEFAULT_IDLE_TIMEOUT = 600.0  # seconds


@dataclass
class GameSession:
    id: str
    world: World
    rng: Rng
    cfg: GameConfig
    tick_count: int = 0
    last_active: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def over(self) -> bool:
        return game_over(self.world)


class SessionStore:
    """Live sessions with lazy idle expiry."""

    def __init__(self, idle_timeout: float = DEFAULT_IDLE_TIMEOUT, clock=time.monotonic):
        self.idle_timeout = idle_timeout
        self.clock = clock
        self._sessions: dict[str, GameSession] = {}
        self._lock = threading.Lock()

    def create(self, seed: int, cfg: GameConfig) -> GameSession:
        world, rng = initial_world(cfg, Rng(seed))
        session = GameSession(
            id=secrets.token_hex(8),
            world=world,
            rng=rng,
            cfg=cfg,
            last_active=self.clock(),
        )
        with self._lock:
            self._purge()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[GameSession]:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_active = self.clock()
            return session

    def _purge(self) -> None:
        now = self.clock()
        dead = [
            sid for sid, s in self._sessions.items()
            if now - s.last_active > self.idle_timeout
        ]
        for sid in dead:
            del self._sessions[sid]


class CreateGameRequest(BaseModel):
    seed: int = 0
    config: Optional[dict] = None


class KeyRequest(BaseModel):
    key: str


def create_app(base_config: GameConfig = GameConfig(),
               idle_timeout: float = DEFAULT_IDLE_TIMEOUT) -> FastAPI:
    app = FastAPI(title="rocket game service")
    # the browser client is typically served from another port
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"])
    store = SessionStore(idle_timeout)
    app.state.sessions = store

    def not_found() -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": "no such game"})

    @app.post("/game")
    def create_game(req: CreateGameRequest):
        try:
            cfg = config_from_json(req.config, base_config)
        except ValueError as err:
            return JSONResponse(status_code=400, content={"error": str(err)})
        session = store.create(req.seed, cfg)
        return {"id": session.id, "world": world_to_json(session.world)}

    @app.post("/game/{session_id}/key")
    def post_key(session_id: str, req: KeyRequest):
        session = store.get(session_id)
        if session is None:
            return not_found()
        with session.lock:
            # a finished game absorbs commands; laggy clients stay safe
            if not session.over:
                session.world = handle_key(session.world, req.key)
            return {"world": world_to_json(session.world), "over": session.over}

    @app.post("/game/{session_id}/tick")
    def post_tick(session_id: str):
        session = store.get(session_id)
        if session is None:
            return not_found()
        with session.lock:
            if not session.over:
                session.world, session.rng = tick(
                    session.world, session.cfg, session.rng
                )
                session.tick_count += 1
            return {"world": world_to_json(session.world), "over": session.over}

    @app.get("/game/{session_id}/scene")
    def get_scene(session_id: str):
        session = store.get(session_id)
        if session is None:
            return not_found()
        with session.lock:
            return scene_to_json(draw_world(session.world, session.cfg))

    @app.get("/game/{session_id}")
    def get_game(session_id: str):
        session = store.get(session_id)
        if session is None:
            return not_found()
        with session.lock:
            return {
                "world": world_to_json(session.world),
                "over": session.over,
                "tick_count": session.tick_count,
            }

    return app
