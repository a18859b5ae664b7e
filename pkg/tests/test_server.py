import asyncio
import json

from softbody import scenarios
from softbody.server import SoftbodyServer


async def start_server(scenario="ring2d", fps=30.0, port=0):
    session = scenarios.build(scenario)
    server = SoftbodyServer(session, fps=fps)
    tcp = await server.serve_tcp("127.0.0.1", port)
    task = asyncio.create_task(server.run())
    return server, tcp, task, tcp.sockets[0].getsockname()[1]


async def stop_server(server, tcp, task):
    server.stopped.set()
    await asyncio.wait_for(task, timeout=5)
    tcp.close()
    await tcp.wait_closed()


class Client:
    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer

    @classmethod
    async def connect(cls, port):
        reader, writer = await asyncio.open_connection("127.0.0.1", port)
        return cls(reader, writer)

    async def send(self, obj):
        self.writer.write(json.dumps(obj).encode() + b"\n")
        await self.writer.drain()

    async def recv(self):
        line = await asyncio.wait_for(self.reader.readline(), timeout=5)
        return json.loads(line)

    async def recv_until(self, pred):
        while True:
            msg = await self.recv()
            if pred(msg):
                return msg

    def close(self):
        self.writer.close()


def test_hello_and_frames():
    async def main():
        server, tcp, task, port = await start_server()
        try:
            client = await Client.connect(port)
            hello = await client.recv()
            assert hello == {"type": "hello", "proto": 1}
            frame = await client.recv_until(lambda m: m.get("type") == "frame")
            assert len(frame["bodies"]) == 1
            assert "steps_per_s" in frame["stats"]
            client.close()
        finally:
            await stop_server(server, tcp, task)
    asyncio.run(main())


def test_two_clients_receive_identical_frames():
    async def main():
        session = scenarios.build("ring2d")
        server = SoftbodyServer(session, fps=60.0)
        tcp = await server.serve_tcp("127.0.0.1", 0)
        port = tcp.sockets[0].getsockname()[1]
        a = await Client.connect(port)
        b = await Client.connect(port)
        await a.recv()
        await b.recv()
        task = asyncio.create_task(server.run())
        try:
            frames_a = []
            frames_b = []
            while len(frames_a) < 4:
                m = await a.recv()
                if m.get("type") == "frame":
                    frames_a.append(m)
            while len(frames_b) < 4:
                m = await b.recv()
                if m.get("type") == "frame":
                    frames_b.append(m)
            ts_a = [f["t"] for f in frames_a]
            ts_b = [f["t"] for f in frames_b]
            assert ts_a == ts_b
            assert frames_a == frames_b
            a.close()
            b.close()
        finally:
            await stop_server(server, tcp, task)
    asyncio.run(main())


def test_command_stress_between_steps():
    """Commands are applied strictly between steps: firehose parameter
    changes while stepping, then verify every reply arrived and the session
    is still consistent."""
    async def main():
        server, tcp, task, port = await start_server("jellyfish2d", fps=120.0)
        try:
            client = await Client.connect(port)
            await client.recv()  # hello
            for i in range(100):
                await client.send({"cmd": "set_param", "name": "ks.structural",
                                   "value": 40 + (i % 20)})
                await client.send({"cmd": "list_params"})
            acks = 0
            listings = 0
            while acks + listings < 200:
                m = await client.recv()
                if m.get("ok") and "name" in m:
                    acks += 1
                elif m.get("ok") and "params" in m:
                    listings += 1
            assert acks == 100 and listings == 100
            session = server.session
            assert session.clock.t == session.clock.step_index * session.params.dt
            for body in session.bodies:
                for p in body.particles:
                    assert session.world.contains(p.position)
            client.close()
        finally:
            await stop_server(server, tcp, task)
    asyncio.run(main())


def test_frame_throttle_interval():
    async def main():
        loop = asyncio.get_running_loop()
        session = scenarios.build("chain1d")
        server = SoftbodyServer(session, fps=25.0)
        emit_times = []
        original = server._broadcast

        def spy(text):
            emit_times.append(loop.time())
            original(text)

        server._broadcast = spy
        server.attach(lambda text: None)  # needs a client to emit at all
        tcp = await server.serve_tcp("127.0.0.1", 0)
        task = asyncio.create_task(server.run())
        await asyncio.sleep(0.6)
        await stop_server(server, tcp, task)
        gaps = [b - a for a, b in zip(emit_times, emit_times[1:])]
        assert gaps, "no frames emitted"
        assert min(gaps) >= 1.0 / 25.0 - 0.001
    asyncio.run(main())


def test_pause_freezes_clock_but_frames_flow():
    async def main():
        server, tcp, task, port = await start_server(fps=60.0)
        try:
            client = await Client.connect(port)
            await client.recv()
            await client.send({"cmd": "pause"})
            await client.recv_until(lambda m: m.get("paused") is True)
            ts = []
            while len(ts) < 3:
                m = await client.recv()
                if m.get("type") == "frame":
                    ts.append(m["t"])
            assert len(set(ts)) == 1
            await client.send({"cmd": "step", "n": 2})
            reply = await client.recv_until(lambda m: "stepped" in m)
            assert reply["t"] == ts[0] + 2 * server.session.params.dt
            client.close()
        finally:
            await stop_server(server, tcp, task)
    asyncio.run(main())


def test_malformed_json_gets_error_reply_and_connection_survives():
    async def main():
        server, tcp, task, port = await start_server()
        try:
            client = await Client.connect(port)
            await client.recv()
            client.writer.write(b"this is not json\n")
            await client.writer.drain()
            reply = await client.recv_until(lambda m: m.get("ok") is False)
            assert reply["error"] == "bad-json"
            await client.send({"cmd": "list_params"})
            ok = await client.recv_until(lambda m: m.get("ok") and "params" in m)
            assert "dt" in ok["params"]
            client.close()
        finally:
            await stop_server(server, tcp, task)
    asyncio.run(main())
