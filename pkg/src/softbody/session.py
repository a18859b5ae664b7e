"""The deterministic stepping engine: the full per-step pipeline, timing
statistics, CSV state dumps, and JSON snapshot/restore.

Step order: controllers (drag anchors, gas modulation, tentacle kinematics),
then the selected integrator per body, then collision resolution, then the
clock.  A failed step rolls the session back to its pre-step state.  Nothing
inside the step reads the wall clock except the statistics, which never feed
back into the simulation or its dumps, so two sessions with equal state stay
bit-identical forever.
"""

from __future__ import annotations

import importlib.resources
import json
import time
from collections import deque
from dataclasses import dataclass, field

from .collision import BoxWorld, select_detector
from .curves import BezierPath, CurveDrive, drive
from .errors import SoftbodyError
from .integrators import select_integrator
from .jellyfish import (SwimController, TentacleChain, animate_tentacles,
                        swim_update, update_tentacle_roots)
from .model import (FORCE_SOURCES, CollisionParams, Drag, Face, GeometryParams,
                    Layers, Particle, SimParams, SoftBody, Spring, SpringCoeffs,
                    Vec3)

SNAPSHOT_VERSION = 1

STATS_WINDOW = 60  # steps in the rolling rate window


@dataclass
class Clock:
    """Step counter and simulation time.

    Time is derived as ``base_t + (step_index - base_step) * dt`` and the
    base is re-anchored when dt changes, so under a constant dt the invariant
    ``t == step_index * dt`` holds exactly.
    """

    step_index: int = 0
    t: float = 0.0
    base_t: float = 0.0
    base_step: int = 0
    last_dt: float | None = None


@dataclass
class Stats:
    """Wall-clock performance counters; diagnostics only, never state."""

    last_step_ms: float = 0.0
    steps_per_s: float = 0.0
    controllers_ms: float = 0.0
    accumulate_ms: float = 0.0
    integrate_ms: float = 0.0
    collide_ms: float = 0.0
    degenerate_springs: int = 0
    window: deque = field(default_factory=lambda: deque(maxlen=STATS_WINDOW))


class Session:
    """World + bodies + drags + controllers + clock: the stepping unit."""

    def __init__(self, params: SimParams | None = None, world: BoxWorld | None = None,
                 bodies: list | None = None, drags: list | None = None,
                 controllers: list | None = None, tentacles: list | None = None,
                 scenario: str | None = None):
        self.params = params if params is not None else SimParams()
        self.world = world if world is not None else BoxWorld()
        self.bodies = bodies if bodies is not None else []
        self.drags = drags if drags is not None else []
        self.controllers = controllers if controllers is not None else []
        self.tentacles = tentacles if tentacles is not None else []
        self.clock = Clock()
        self.stats = Stats()
        self.scenario = scenario
        self.spawned = []
        self.last_contacts = []

    # -- stepping ---------------------------------------------------------

    def set_integrator(self, integrator_id: str) -> None:
        """Switch integrators at runtime; clears staggered half-step buffers
        so feynman re-bootstraps."""
        select_integrator(integrator_id)
        self.params.integrator = integrator_id
        for body in self.bodies:
            body.half_step_velocities = None

    def _enabled(self, body: SoftBody) -> bool:
        return self.params.toggles.get(body.dimensionality, True)

    def step(self) -> "Session":
        backup = _capture(self)
        try:
            self._step_inner()
        except Exception:
            _restore_capture(self, backup)
            raise
        return self

    def _step_inner(self) -> None:
        params = self.params
        params.validate()
        dt = params.dt
        clock = self.clock
        if clock.last_dt is None:
            clock.last_dt = dt
        elif dt != clock.last_dt:
            clock.base_t = clock.t
            clock.base_step = clock.step_index
            clock.last_dt = dt

        t_wall0 = time.perf_counter()
        t_now = clock.t
        for body in self.bodies:
            body.accumulate_seconds = 0.0

        for ctrl in self.controllers:
            body = self.bodies[ctrl.body]
            if not self._enabled(body):
                continue
            if isinstance(ctrl, SwimController):
                swim_update(ctrl, t_now, body, self.drags[ctrl.drag_index])
            elif isinstance(ctrl, CurveDrive):
                drive(body, ctrl, self.drags[ctrl.drag_index], t_now)
            else:
                raise SoftbodyError("unknown-controller", f"unhandled controller {type(ctrl)}")
        for chain in self.tentacles:
            body = self.bodies[chain.body]
            if self._enabled(body):
                update_tentacle_roots(body, [chain])
        animate_tentacles(
            [c for c in self.tentacles if self._enabled(self.bodies[c.body])], t_now)
        t_wall1 = time.perf_counter()

        step_fn = select_integrator(params.integrator)
        for i, body in enumerate(self.bodies):
            if not self._enabled(body):
                continue
            body_drags = [d for d in self.drags if d.body == i]
            step_fn(body, params, body_drags, dt)
        t_wall2 = time.perf_counter()

        resolver = select_detector()
        contacts = []
        for body in self.bodies:
            if self._enabled(body):
                contacts.extend(resolver(body, self.world,
                                         params.collision.penalty_k,
                                         params.collision.restitution))
        self.last_contacts = contacts
        t_wall3 = time.perf_counter()

        clock.step_index += 1
        clock.t = clock.base_t + (clock.step_index - clock.base_step) * dt

        stats = self.stats
        stats.controllers_ms = (t_wall1 - t_wall0) * 1e3
        stats.integrate_ms = (t_wall2 - t_wall1) * 1e3
        stats.collide_ms = (t_wall3 - t_wall2) * 1e3
        stats.accumulate_ms = sum(b.accumulate_seconds for b in self.bodies) * 1e3
        stats.last_step_ms = (t_wall3 - t_wall0) * 1e3
        stats.degenerate_springs = sum(b.degenerate_spring_count for b in self.bodies)
        stats.window.append(t_wall3 - t_wall0)
        total = sum(stats.window)
        stats.steps_per_s = len(stats.window) / total if total > 0 else 0.0

    def run(self, n_steps: int) -> "Session":
        if n_steps < 0:
            raise SoftbodyError("invalid-argument", "n_steps must be >= 0")
        for k in range(n_steps):
            try:
                self.step()
            except SoftbodyError as e:
                raise SoftbodyError(e.code, f"{e} (after {k} completed steps)") from e
        return self


def step(session: Session) -> Session:
    return session.step()


def run(session: Session, n_steps: int) -> Session:
    return session.run(n_steps)


# -- transactional backup -------------------------------------------------

def _capture(session: Session):
    bodies = []
    for body in session.bodies:
        parts = []
        for p in body.particles:
            fb = p.force_by_source
            parts.append((
                p.position.x, p.position.y, p.position.z,
                p.velocity.x, p.velocity.y, p.velocity.z,
                tuple((fb[s].x, fb[s].y, fb[s].z) for s in FORCE_SOURCES),
            ))
        half = None
        if body.half_step_velocities is not None:
            half = [(v.x, v.y, v.z) for v in body.half_step_velocities]
        bodies.append((parts, half, body.gas_constant, body.degenerate_spring_count))
    drags = [(d.target, d.anchor.copy(), d.ks, d.kd, d.active, d.body) for d in session.drags]
    chains = [(list(c.angles), [v.copy() for v in c.joints], c.root_position.copy())
              for c in session.tentacles]
    clock = session.clock
    return (bodies, drags, chains,
            (clock.step_index, clock.t, clock.base_t, clock.base_step, clock.last_dt))


def _restore_capture(session: Session, backup) -> None:
    bodies, drags, chains, clock_state = backup
    for body, (parts, half, gas, degen) in zip(session.bodies, bodies):
        for p, row in zip(body.particles, parts):
            p.position.set(row[0], row[1], row[2])
            p.velocity.set(row[3], row[4], row[5])
            for s, (fx, fy, fz) in zip(FORCE_SOURCES, row[6]):
                p.force_by_source[s].set(fx, fy, fz)
        body.half_step_velocities = (
            None if half is None else [Vec3(x, y, z) for x, y, z in half])
        body.gas_constant = gas
        body.degenerate_spring_count = degen
    for d, (target, anchor, ks, kd, active, body_i) in zip(session.drags, drags):
        d.target = target
        d.anchor = anchor
        d.ks = ks
        d.kd = kd
        d.active = active
        d.body = body_i
    for c, (angles, joints, root) in zip(session.tentacles, chains):
        c.angles = angles
        c.joints = joints
        c.root_position = root
    clock = session.clock
    clock.step_index, clock.t, clock.base_t, clock.base_step, clock.last_dt = clock_state


# -- CSV dumps -------------------------------------------------------------

PARTICLE_HEADER = ("frame,t,body,pid,px,py,pz,vx,vy,vz,"
                   "fgx,fgy,fgz,fsx,fsy,fsz,fpx,fpy,fpz,fdx,fdy,fdz,fcx,fcy,fcz")
SPRING_HEADER = "frame,body,sid,kind,p1,p2,rest,len"


class DumpWriter:
    """Paired CSV sink: ``<base>.particles.csv`` and ``<base>.springs.csv``.

    Reals are rendered with shortest round-trip decimals, so a dumped value
    re-parses to the exact in-memory double.
    """

    def __init__(self, base_path: str):
        base = str(base_path)
        if base.endswith(".csv"):
            base = base[:-4]
        self.particles_path = base + ".particles.csv"
        self.springs_path = base + ".springs.csv"
        try:
            self._particles = open(self.particles_path, "w", encoding="utf-8", newline="\n")
            self._springs = open(self.springs_path, "w", encoding="utf-8", newline="\n")
            self._particles.write(PARTICLE_HEADER + "\n")
            self._springs.write(SPRING_HEADER + "\n")
        except OSError as e:
            raise SoftbodyError("dump-io", f"cannot open dump files: {e}") from e

    def write_rows(self, particle_rows, spring_rows) -> None:
        try:
            self._particles.writelines(particle_rows)
            self._springs.writelines(spring_rows)
        except (OSError, ValueError) as e:
            raise SoftbodyError("dump-io", f"dump write failed: {e}") from e

    def close(self) -> None:
        self._particles.close()
        self._springs.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def dump_frame(session: Session, sink: DumpWriter) -> None:
    """Append the current (post-step) state as one frame of CSV rows."""
    frame = session.clock.step_index
    t = repr(session.clock.t)
    particle_rows = []
    spring_rows = []
    for bi, body in enumerate(session.bodies):
        for p in body.particles:
            fb = p.force_by_source
            cells = [str(frame), t, str(bi), str(p.id),
                     repr(p.position.x), repr(p.position.y), repr(p.position.z),
                     repr(p.velocity.x), repr(p.velocity.y), repr(p.velocity.z)]
            for src in FORCE_SOURCES:
                f = fb[src]
                cells.extend((repr(f.x), repr(f.y), repr(f.z)))
            particle_rows.append(",".join(cells) + "\n")
        for s in body.springs:
            a = body.particles[s.p1].position
            b = body.particles[s.p2].position
            spring_rows.append(",".join((
                str(frame), str(bi), str(s.id), s.kind, str(s.p1), str(s.p2),
                repr(s.rest_length), repr((a - b).norm()))) + "\n")
    sink.write_rows(particle_rows, spring_rows)


# -- snapshot / restore -----------------------------------------------------

def _vec(v: Vec3) -> list:
    return [v.x, v.y, v.z]


def snapshot(session: Session) -> dict:
    """Full structured state; restoring it reproduces a session whose
    subsequent trajectory is bit-identical."""
    bodies = []
    for body in session.bodies:
        bodies.append({
            "dimensionality": body.dimensionality,
            "gas_constant": body.gas_constant,
            "heading": _vec(body.heading),
            "particles": [{
                "position": _vec(p.position),
                "velocity": _vec(p.velocity),
                "mass": p.mass,
                "pinned": p.pinned,
                "forces": {src: _vec(p.force_by_source[src]) for src in FORCE_SOURCES},
            } for p in body.particles],
            "springs": [{
                "p1": s.p1, "p2": s.p2, "rest": s.rest_length,
                "ks": s.ks, "kd": s.kd, "kind": s.kind,
            } for s in body.springs],
            "faces": [list(f.indices) for f in body.faces],
            "layers": {
                "outer": list(body.layers.outer),
                "inner": list(body.layers.inner),
                "center": body.layers.center,
            },
            "half_step_velocities": (
                None if body.half_step_velocities is None
                else [_vec(v) for v in body.half_step_velocities]),
        })
    controllers = []
    for ctrl in session.controllers:
        if isinstance(ctrl, SwimController):
            controllers.append({
                "type": "swim", "body": ctrl.body, "drag_index": ctrl.drag_index,
                "target": ctrl.target, "period": ctrl.period, "duty": ctrl.duty,
                "anchor_offset": ctrl.anchor_offset,
                "breath_amplitude": ctrl.breath_amplitude,
                "base_gas": ctrl.base_gas, "enabled": ctrl.enabled,
            })
        elif isinstance(ctrl, CurveDrive):
            controllers.append({
                "type": "curve", "body": ctrl.body, "drag_index": ctrl.drag_index,
                "control_points": [_vec(p) for p in ctrl.path.control_points],
                "duration": ctrl.duration, "ks": ctrl.ks, "kd": ctrl.kd,
            })
    for chain in session.tentacles:
        controllers.append({
            "type": "tentacle", "body": chain.body, "root": chain.root,
            "joint_count": chain.joint_count, "segment_length": chain.segment_length,
            "phase": chain.phase, "amplitude": chain.amplitude,
            "phase_lag": chain.phase_lag, "period": chain.period,
        })
    params = session.params
    return {
        "version": SNAPSHOT_VERSION,
        "params": {
            "integrator": params.integrator,
            "dt": params.dt,
            "ks": {k: params.ks.get(k) for k in ("structural", "radial", "shear", "drag", "center")},
            "kd": {k: params.kd.get(k) for k in ("structural", "radial", "shear", "drag", "center")},
            "gravity": _vec(params.gravity),
            "default_mass": params.default_mass,
            "gas_constant": params.gas_constant,
            "geometry": {
                "particles_per_layer_2d": params.geometry.particles_per_layer_2d,
                "subdivision_iterations_3d": params.geometry.subdivision_iterations_3d,
                "bell_profile_points": params.geometry.bell_profile_points,
                "bell_slices": params.geometry.bell_slices,
                "subdivision_cap": params.geometry.subdivision_cap,
            },
            "collision": {
                "penalty_k": params.collision.penalty_k,
                "restitution": params.collision.restitution,
            },
            "toggles": dict(params.toggles),
        },
        "world": {"min": _vec(session.world.min), "max": _vec(session.world.max)},
        "bodies": bodies,
        "drags": [{
            "body": d.body, "target": d.target, "anchor": _vec(d.anchor),
            "ks": d.ks, "kd": d.kd, "active": d.active,
        } for d in session.drags],
        "controllers": controllers,
        "clock": {
            "step_index": session.clock.step_index,
            "t": session.clock.t,
            "base_t": session.clock.base_t,
            "base_step": session.clock.base_step,
            "last_dt": session.clock.last_dt,
        },
    }


def snapshot_json(session: Session) -> str:
    return json.dumps(snapshot(session), indent=1, sort_keys=False)


_schema_cache = None


def _schema() -> dict:
    global _schema_cache
    if _schema_cache is None:
        text = (importlib.resources.files("softbody") / "snapshot.schema.json").read_text()
        _schema_cache = json.loads(text)
    return _schema_cache


def restore(state: dict) -> Session:
    """Rebuild a session from a snapshot document.

    The document is validated against the shipped JSON schema first; any
    violation raises ``corrupt-snapshot`` naming the offending field path.
    """
    import jsonschema

    try:
        jsonschema.validate(state, _schema())
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SoftbodyError("corrupt-snapshot", f"{e.message} at {path}") from e

    sp = state["params"]
    params = SimParams(
        integrator=sp["integrator"],
        dt=sp["dt"],
        ks=SpringCoeffs(**sp["ks"]),
        kd=SpringCoeffs(**sp["kd"]),
        gravity=Vec3.from_list(sp["gravity"]),
        default_mass=sp["default_mass"],
        gas_constant=sp["gas_constant"],
        geometry=GeometryParams(**sp["geometry"]),
        collision=CollisionParams(**sp["collision"]),
        toggles=dict(sp["toggles"]),
    )
    world = BoxWorld(Vec3.from_list(state["world"]["min"]),
                     Vec3.from_list(state["world"]["max"]))
    bodies = []
    for bi, sb in enumerate(state["bodies"]):
        try:
            particles = []
            for i, pp in enumerate(sb["particles"]):
                p = Particle(i, Vec3.from_list(pp["position"]),
                             Vec3.from_list(pp["velocity"]),
                             mass=pp["mass"], pinned=pp["pinned"])
                for src in FORCE_SOURCES:
                    p.force_by_source[src] = Vec3.from_list(pp["forces"][src])
                particles.append(p)
            springs = [Spring(i, ss["p1"], ss["p2"], ss["rest"], ss["ks"], ss["kd"], ss["kind"])
                       for i, ss in enumerate(sb["springs"])]
            faces = [Face(f) for f in sb["faces"]]
            layers = Layers(outer=list(sb["layers"]["outer"]),
                            inner=list(sb["layers"]["inner"]),
                            center=sb["layers"]["center"])
            body = SoftBody(sb["dimensionality"], particles, springs, faces, layers,
                            gas_constant=sb["gas_constant"],
                            heading=Vec3.from_list(sb["heading"]))
            if sb["half_step_velocities"] is not None:
                body.half_step_velocities = [Vec3.from_list(v)
                                             for v in sb["half_step_velocities"]]
            bodies.append(body)
        except SoftbodyError as e:
            raise SoftbodyError("corrupt-snapshot", f"{e} at bodies/{bi}") from e
    drags = [Drag(target=sd["target"], anchor=Vec3.from_list(sd["anchor"]),
                  ks=sd["ks"], kd=sd["kd"], active=sd["active"], body=sd["body"])
             for sd in state["drags"]]
    controllers = []
    tentacles = []
    for sc in state["controllers"]:
        if sc["type"] == "swim":
            controllers.append(SwimController(
                period=sc["period"], duty=sc["duty"], anchor_offset=sc["anchor_offset"],
                breath_amplitude=sc["breath_amplitude"], base_gas=sc["base_gas"],
                target=sc["target"], enabled=sc["enabled"], body=sc["body"],
                drag_index=sc["drag_index"]))
        elif sc["type"] == "curve":
            controllers.append(CurveDrive(
                path=BezierPath([Vec3.from_list(p) for p in sc["control_points"]]),
                duration=sc["duration"], ks=sc["ks"], kd=sc["kd"], body=sc["body"],
                drag_index=sc["drag_index"]))
        elif sc["type"] == "tentacle":
            tentacles.append(TentacleChain(
                root=sc["root"], joint_count=sc["joint_count"],
                segment_length=sc["segment_length"], phase=sc["phase"],
                amplitude=sc["amplitude"], phase_lag=sc["phase_lag"],
                period=sc["period"], body=sc["body"]))
        else:
            raise SoftbodyError("corrupt-snapshot",
                                f"unknown controller type {sc['type']!r} at controllers")
    session = Session(params, world, bodies, drags, controllers, tentacles)
    sc = state["clock"]
    session.clock = Clock(step_index=sc["step_index"], t=sc["t"], base_t=sc["base_t"],
                          base_step=sc["base_step"], last_dt=sc["last_dt"])
    # Recompute the tentacle decoration state for the restored time.
    for chain in session.tentacles:
        update_tentacle_roots(session.bodies[chain.body], [chain])
    animate_tentacles(session.tentacles, session.clock.t)
    return session


def restore_json(text: str) -> Session:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SoftbodyError("corrupt-snapshot", f"not valid JSON: {e}") from e
    return restore(data)
