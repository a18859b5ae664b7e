"""Streaming service: steps one session in real time and talks JSON to any
number of clients over WebSocket and newline-delimited TCP.

One task owns the session.  Network readers only enqueue commands; the
stepping loop drains the queue strictly between physics steps, so a command
can never observe or mutate a half-stepped state.  Frames are broadcast at
most at the configured rate; physics stepping is paced by the wall clock at
the fixed dt (or flat out when a step budget is given, which is the headless
parity mode).
"""

from __future__ import annotations

import asyncio
import json
import logging

from .commands import CommandProcessor, build_frame
from .session import DumpWriter, Session, dump_frame

log = logging.getLogger(__name__)

HELLO = {"type": "hello", "proto": 1}

# Stepping may lag behind the wall clock (slow hardware, paused debugger);
# never try to catch up by more than this many steps at once.
MAX_CATCHUP_STEPS = 50


class SoftbodyServer:
    def __init__(self, session: Session, fps: float = 30.0,
                 max_steps: int | None = None, dump_path: str | None = None,
                 realtime: bool = True):
        self.session = session
        self.processor = CommandProcessor(session)
        self.fps = fps
        self.max_steps = max_steps
        self.dump = DumpWriter(dump_path) if dump_path else None
        self.realtime = realtime and max_steps is None
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.clients: set = set()
        self.stopped = asyncio.Event()

    # -- client bookkeeping -------------------------------------------------

    def attach(self, send) -> None:
        self.clients.add(send)

    def detach(self, send) -> None:
        self.clients.discard(send)

    def _broadcast(self, text: str) -> None:
        for send in list(self.clients):
            try:
                send(text)
            except Exception:
                self.clients.discard(send)

    # -- the stepping loop ---------------------------------------------------

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        frame_interval = 1.0 / self.fps if self.fps > 0 else 0.0
        last_emit = -1e9
        next_step_due = loop.time()
        try:
            while not self.stopped.is_set():
                await self._drain_inbox()
                stepped = False
                if self.max_steps is not None:
                    if self.session.clock.step_index >= self.max_steps:
                        break
                    self._step_once()
                    stepped = True
                elif self.processor.paused:
                    next_step_due = loop.time()
                    await asyncio.sleep(0.005)
                else:
                    now = loop.time()
                    budget = MAX_CATCHUP_STEPS
                    while now >= next_step_due and budget > 0:
                        self._step_once()
                        stepped = True
                        next_step_due += self.session.params.dt
                        budget -= 1
                    if budget == 0:
                        next_step_due = loop.time()

                now = loop.time()
                if self.clients and now - last_emit >= frame_interval:
                    self._broadcast(json.dumps(build_frame(self.session)))
                    last_emit = now
                if self.max_steps is None and not stepped:
                    await asyncio.sleep(max(0.0, min(next_step_due - loop.time(), 0.01)))
                elif self.max_steps is not None:
                    # parity mode runs flat out but must still yield so
                    # readers can enqueue commands between steps
                    await asyncio.sleep(0)
        finally:
            if self.dump is not None:
                self.dump.close()

    def _step_once(self) -> None:
        try:
            self.session.step()
        except Exception:
            log.exception("step failed; session state rolled back")
            self.processor.paused = True
            return
        if self.dump is not None:
            dump_frame(self.session, self.dump)

    async def _drain_inbox(self) -> None:
        while not self.inbox.empty():
            reply_to, cmd = self.inbox.get_nowait()
            reply = self.processor.handle(cmd)
            if reply_to is not None:
                try:
                    reply_to(json.dumps(reply))
                except Exception:
                    pass

    # -- transports ----------------------------------------------------------

    async def serve_tcp(self, host: str, port: int):
        async def on_client(reader, writer):
            def send(text: str) -> None:
                writer.write(text.encode() + b"\n")

            self.attach(send)
            send(json.dumps(HELLO))
            try:
                while True:
                    line = await reader.readline()
                    if not line:
                        break
                    try:
                        cmd = json.loads(line)
                    except json.JSONDecodeError:
                        send(json.dumps({"ok": False, "error": "bad-json"}))
                        continue
                    await self.inbox.put((send, cmd))
            except (ConnectionError, asyncio.IncompleteReadError):
                pass
            finally:
                self.detach(send)
                writer.close()

        return await asyncio.start_server(on_client, host, port)

    async def serve_websocket(self, host: str, port: int):
        import websockets

        async def on_client(ws):
            def send(text: str) -> None:
                # called from the stepping task in the same loop; hand the
                # actual transmission off to a socket task
                asyncio.ensure_future(_safe_send(ws, text))

            self.attach(send)
            send(json.dumps(HELLO))
            try:
                async for message in ws:
                    try:
                        cmd = json.loads(message)
                    except json.JSONDecodeError:
                        send(json.dumps({"ok": False, "error": "bad-json"}))
                        continue
                    await self.inbox.put((send, cmd))
            except websockets.ConnectionClosed:
                pass
            finally:
                self.detach(send)

        return await websockets.serve(on_client, host, port)


async def _safe_send(ws, text: str) -> None:
    try:
        await ws.send(text)
    except Exception:
        pass


async def serve(session: Session, port: int, fps: float = 30.0,
                host: str = "127.0.0.1", tcp_port: int | None = None,
                max_steps: int | None = None, dump_path: str | None = None) -> None:
    """Run the service until cancelled (or until ``max_steps`` completes).

    WebSocket on ``port``, newline-delimited TCP on ``tcp_port``
    (default ``port + 1``).
    """
    server = SoftbodyServer(session, fps=fps, max_steps=max_steps, dump_path=dump_path)
    if tcp_port is None:
        tcp_port = port + 1
    ws_server = await server.serve_websocket(host, port)
    tcp_server = await server.serve_tcp(host, tcp_port)
    log.info("serving websocket on %s:%d, tcp on %s:%d", host, port, host, tcp_port)
    try:
        await server.run()
    finally:
        ws_server.close()
        tcp_server.close()
        await tcp_server.wait_closed()
