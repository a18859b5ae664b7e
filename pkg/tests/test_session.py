import copy
import json

import pytest

from softbody.collision import BoxWorld
from softbody.errors import SoftbodyError
from softbody.geometry import RingSpec, build_ring_2d, translate
from softbody.jellyfish import build_jellyfish_2d
from softbody.model import (Drag, Layers, Particle, SimParams, SoftBody, Vec3)
from softbody.session import (DumpWriter, Session, dump_frame, restore,
                              restore_json, snapshot, snapshot_json)


def jellyfish_session(integrator="euler", gravity=None):
    params = SimParams(integrator=integrator)
    if gravity is not None:
        params.gravity = gravity
    body, controller, chains = build_jellyfish_2d(params)
    translate(body, Vec3(0.0, 2.5, 0.0))
    drag = Drag(ks=params.ks.drag, kd=params.kd.drag)
    return Session(params=params, bodies=[body], drags=[drag],
                   controllers=[controller], tentacles=chains)


def tall_box():
    return BoxWorld(Vec3(-50.0, 0.0, -50.0), Vec3(50.0, 100.0, 50.0))


class TestStep:
    def test_empty_session_advances_clock_only(self):
        session = Session()
        session.step()
        assert session.clock.step_index == 1
        assert session.clock.t == session.params.dt
        assert session.bodies == []

    def test_free_fall_matches_explicit_euler_closed_form(self):
        params = SimParams(dt=0.1)
        body = SoftBody("d1", [Particle(0, Vec3(0.0, 10.0, 0.0))], [], [],
                        Layers(outer=[0]))
        session = Session(params=params, bodies=[body], world=tall_box())
        session.run(10)
        # y = 10 - g dt^2 * sum(k, k=0..9)
        assert body.particles[0].position.y == pytest.approx(5.5855, abs=1e-12)

    def test_identical_sessions_stay_bit_identical(self):
        a = jellyfish_session()
        b = jellyfish_session()
        a.run(300)
        b.run(300)
        assert snapshot_json(a) == snapshot_json(b)

    def test_t_equals_step_times_dt_under_constant_dt(self):
        session = jellyfish_session()
        session.run(137)
        assert session.clock.t == 137 * session.params.dt

    def test_dt_change_rebases_clock(self):
        session = jellyfish_session()
        session.run(10)
        t_before = session.clock.t
        session.params.dt = 0.002
        session.run(5)
        assert session.clock.t == pytest.approx(t_before + 5 * 0.002, rel=1e-15)

    def test_disabled_dimensionality_is_frozen(self):
        session = jellyfish_session()
        session.params.toggles["d2"] = False
        before = snapshot(session)["bodies"]
        session.run(50)
        assert snapshot(session)["bodies"] == before
        assert session.clock.step_index == 50


class TestRun:
    def test_zero_steps_is_identity(self):
        session = jellyfish_session()
        before = snapshot_json(session)
        session.run(0)
        assert snapshot_json(session) == before

    def test_run_composes(self):
        a = jellyfish_session()
        b = jellyfish_session()
        a.run(120)
        b.run(70)
        b.run(50)
        assert snapshot_json(a) == snapshot_json(b)

    def test_failed_step_reports_completed_count(self):
        session = jellyfish_session()
        session.run(3)
        session.drags.append(Drag(target=9999, active=True))
        with pytest.raises(SoftbodyError) as e:
            session.run(10)
        assert e.value.code == "bad-target"
        assert "0 completed" in str(e.value)


class TestTransactionalStep:
    def test_failed_step_leaves_state_intact(self):
        session = jellyfish_session()
        session.run(5)
        before = snapshot_json(session)
        session.drags.append(Drag(target=9999, active=True))
        with pytest.raises(SoftbodyError):
            session.step()
        session.drags.pop()
        assert snapshot_json(session) == before
        # and the session still works afterwards
        session.step()
        assert session.clock.step_index == 6


class TestDump:
    def test_row_counts(self, tmp_path):
        session = jellyfish_session()
        with DumpWriter(tmp_path / "dump") as sink:
            session.step()
            dump_frame(session, sink)
        particles = (tmp_path / "dump.particles.csv").read_text().splitlines()
        springs = (tmp_path / "dump.springs.csv").read_text().splitlines()
        body = session.bodies[0]
        assert len(particles) == 1 + len(body.particles)
        assert len(springs) == 1 + len(body.springs)

    def test_single_particle_body_rows(self, tmp_path):
        params = SimParams()
        body = SoftBody("d1", [Particle(0, Vec3(0, 5, 0))], [], [], Layers(outer=[0]))
        session = Session(params=params, bodies=[body], world=tall_box())
        with DumpWriter(tmp_path / "one") as sink:
            session.step()
            dump_frame(session, sink)
        assert len((tmp_path / "one.particles.csv").read_text().splitlines()) == 2
        assert len((tmp_path / "one.springs.csv").read_text().splitlines()) == 1

    def test_full_precision_round_trip(self, tmp_path):
        session = jellyfish_session()
        session.run(17)
        with DumpWriter(tmp_path / "rt") as sink:
            dump_frame(session, sink)
        lines = (tmp_path / "rt.particles.csv").read_text().splitlines()[1:]
        body = session.bodies[0]
        for line in lines:
            cells = line.split(",")
            pid = int(cells[3])
            p = body.particles[pid]
            assert float(cells[4]) == p.position.x
            assert float(cells[5]) == p.position.y
            assert float(cells[8]) == p.velocity.y

    def test_identical_states_dump_identical_rows_except_frame(self, tmp_path):
        a = jellyfish_session()
        b = jellyfish_session()
        a.run(10)
        b.run(11)  # same trajectory, one step further
        with DumpWriter(tmp_path / "a") as sink:
            dump_frame(a, sink)
        a.step()  # now same state as b
        with DumpWriter(tmp_path / "a2") as sink:
            dump_frame(a, sink)
        with DumpWriter(tmp_path / "b") as sink:
            dump_frame(b, sink)
        assert (tmp_path / "a2.particles.csv").read_text() == \
            (tmp_path / "b.particles.csv").read_text()
        earlier = (tmp_path / "a.particles.csv").read_text().splitlines()[1:]
        later = (tmp_path / "a2.particles.csv").read_text().splitlines()[1:]
        assert len(earlier) == len(later)

    def test_dump_io_error(self, tmp_path):
        session = jellyfish_session()
        sink = DumpWriter(tmp_path / "closed")
        sink.close()
        with pytest.raises(SoftbodyError) as e:
            dump_frame(session, sink)
        assert e.value.code == "dump-io"

    def test_unwritable_path_raises_dump_io(self):
        with pytest.raises(SoftbodyError) as e:
            DumpWriter("/nonexistent-dir/sub/dump")
        assert e.value.code == "dump-io"


class TestSnapshotRestore:
    @pytest.mark.parametrize("integrator", ["euler", "midpoint", "feynman", "rk4"])
    def test_restore_continues_bit_identically(self, integrator):
        full = jellyfish_session(integrator)
        full.run(150)
        mid = snapshot_json(full)
        restored = restore_json(mid)
        full.run(100)
        restored.run(100)
        assert snapshot_json(full) == snapshot_json(restored)

    def test_feynman_half_step_buffer_survives(self):
        session = jellyfish_session("feynman")
        session.run(40)
        state = snapshot(session)
        buf = state["bodies"][0]["half_step_velocities"]
        assert buf is not None and len(buf) == len(session.bodies[0].particles)
        restored = restore(state)
        assert restored.bodies[0].half_step_velocities is not None

    def test_restore_honors_snapshot_integrator(self):
        session = jellyfish_session("euler")
        session.run(20)
        state = snapshot(session)
        state["params"]["integrator"] = "feynman"
        restored = restore(state)
        assert restored.params.integrator == "feynman"
        assert restored.bodies[0].half_step_velocities is None
        restored.step()  # bootstraps
        assert restored.bodies[0].half_step_velocities is not None

    def test_corrupt_snapshot_names_field_path(self):
        session = jellyfish_session()
        state = snapshot(session)
        state["bodies"][0]["particles"][3]["mass"] = -1.0
        with pytest.raises(SoftbodyError) as e:
            restore(state)
        assert e.value.code == "corrupt-snapshot"
        assert "bodies/0/particles/3/mass" in str(e.value)

    def test_corrupt_snapshot_bad_index(self):
        session = jellyfish_session()
        state = snapshot(session)
        state["bodies"][0]["springs"][0]["p2"] = 10_000
        with pytest.raises(SoftbodyError) as e:
            restore(state)
        assert e.value.code == "corrupt-snapshot"

    def test_not_json(self):
        with pytest.raises(SoftbodyError) as e:
            restore_json("{nope")
        assert e.value.code == "corrupt-snapshot"

    def test_snapshot_is_plain_json(self):
        session = jellyfish_session()
        session.run(5)
        text = snapshot_json(session)
        doc = json.loads(text)
        assert doc["version"] == 1
        assert set(doc) == {"version", "params", "world", "bodies", "drags",
                            "controllers", "clock"}


class TestStats:
    def test_counters_populate(self):
        session = jellyfish_session()
        session.run(70)
        stats = session.stats
        assert stats.last_step_ms >= 0.0
        assert stats.steps_per_s > 0.0
        assert len(stats.window) == 60  # rolling window caps at 60
        assert stats.integrate_ms >= stats.accumulate_ms >= 0.0
        assert stats.degenerate_springs == 0
