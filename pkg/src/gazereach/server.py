"""Live simulation service: one authoritative session streamed over WebSockets.

Clients send gaze/reset/fault messages; the server ticks the session at the
configured rate on real time and broadcasts a state snapshot every tick.
Client count never affects the session: inputs are queued and drained once
per tick, snapshots are plain copies.
"""

from __future__ import annotations

import asyncio
import json
import logging
from pathlib import Path

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .config import ConfigError, SessionConfig, _faults_from_dict
from .gaze import GazeSample
from .session import Session

log = logging.getLogger("gazereach.server")


class LiveServer:
    def __init__(self, config: SessionConfig, log_path: str | Path | None = None):
        self.config = config
        self.log_path = Path(log_path) if log_path else None
        self.session = Session(config)
        self._clients: set = set()
        self._inbox: asyncio.Queue = asyncio.Queue()
        self._last_seq = -1
        self._last_gaze_t: float | None = None
        self._stop = asyncio.Event()
        self.port: int | None = None

    # -- client handling -----------------------------------------------------

    async def _handler(self, websocket):
        self._clients.add(websocket)
        log.info("client connected (%d total)", len(self._clients))
        try:
            async for raw in websocket:
                try:
                    message = json.loads(raw)
                    if not isinstance(message, dict) or "type" not in message:
                        raise ValueError("message must be an object with a 'type' field")
                except (json.JSONDecodeError, ValueError) as exc:
                    await websocket.send(json.dumps({"type": "error", "message": str(exc)}))
                    continue
                await self._inbox.put((websocket, message))
        except ConnectionClosed:
            pass
        finally:
            self._clients.discard(websocket)
            log.info("client disconnected (%d total)", len(self._clients))

    def _apply_message(self, websocket, message: dict) -> str | None:
        """Apply one client message to the session; returns an error string or None."""
        kind = message.get("type")
        if kind == "gaze":
            try:
                u, v = float(message["u"]), float(message["v"])
            except (KeyError, TypeError, ValueError):
                return "gaze message needs numeric 'u' and 'v'"
            # client timestamps are not trusted for ordering; sim time rules
            t = self.session.clock + self.config.tick_dt
            if self._last_gaze_t is not None and t <= self._last_gaze_t:
                t = self._last_gaze_t + 1e-6
            self._last_gaze_t = t
            valid = self.session.camera.in_bounds(u, v)
            self.session.submit_gaze(GazeSample(t=t, u=u, v=v, valid=valid))
            return None
        if kind == "reset":
            self.session = Session(self.config)
            self._last_seq = -1
            self._last_gaze_t = None
            return None
        if kind == "inject_fault":
            try:
                faults = _faults_from_dict(
                    {k: v for k, v in message.items() if k != "type"}
                )
            except ConfigError as exc:
                return str(exc)
            executor = self.session.executor
            if faults.force_spike is not None:
                executor.faults.force_spike = faults.force_spike
            executor.faults.grasp_fail_on.extend(faults.grasp_fail_on)
            return None
        return f"unknown message type {kind!r}"

    # -- tick loop -------------------------------------------------------------

    async def _tick_loop(self):
        loop = asyncio.get_running_loop()
        next_tick = loop.time()
        while not self._stop.is_set():
            while not self._inbox.empty():
                websocket, message = self._inbox.get_nowait()
                error = self._apply_message(websocket, message)
                if error is not None:
                    await self._send(websocket, json.dumps({"type": "error", "message": error}))
            self.session.tick()
            snapshot = self.session.snapshot(self._last_seq)
            if self.session.log.events:
                self._last_seq = self.session.log.events[-1].seq
            if self._clients:
                frame = json.dumps(snapshot, separators=(",", ":"))
                await asyncio.gather(*(self._send(ws, frame) for ws in list(self._clients)))
            next_tick += self.config.tick_dt
            delay = next_tick - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_tick = loop.time()  # fell behind; don't try to catch up

    async def _send(self, websocket, frame: str):
        try:
            await websocket.send(frame)
        except ConnectionClosed:
            self._clients.discard(websocket)

    # -- lifecycle ---------------------------------------------------------------

    async def run(self, host: str = "127.0.0.1", port: int = 0):
        async with ws_serve(self._handler, host, port) as server:
            self.port = server.sockets[0].getsockname()[1] if server.sockets else port
            log.info("serving on ws://%s:%d", host, self.port)
            try:
                await self._tick_loop()
            finally:
                if self.log_path is not None:
                    self.session.log.write(self.log_path)

    def stop(self):
        self._stop.set()


def serve_forever(
    config: SessionConfig,
    host: str = "127.0.0.1",
    port: int = 8765,
    log_path: str | Path | None = None,
):
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    server = LiveServer(config, log_path=log_path)
    try:
        asyncio.run(server.run(host=host, port=port))
    except KeyboardInterrupt:
        pass
