"""Wire-level command handling: the controller surface of the service.

Commands arrive as JSON objects and are applied strictly between physics
steps by the owner of the session.  Every command produces a reply dict
``{"ok": true, ...}`` or ``{"ok": false, "error": code}``; malformed input
never raises out of :meth:`CommandProcessor.handle`.
"""

from __future__ import annotations

from .collision import BoxWorld
from .errors import SoftbodyError
from .jellyfish import SwimController
from .model import Drag, Vec3, nearest_particle
from .session import Session, snapshot

# Advertised bounds for numeric parameters, [low, high] with null for open
# ends; the UI clamps its widgets to these.
PARAM_BOUNDS = {
    "dt": [1e-5, 0.1],
    "default_mass": [1e-3, 100.0],
    "gas_constant": [0.0, 1e4],
    "collision.penalty_k": [0.0, 1e6],
    "collision.restitution": [0.0, 1.0],
    "geometry.particles_per_layer_2d": [3, 256],
    "geometry.subdivision_iterations_3d": [0, 4],
    "geometry.bell_profile_points": [3, 64],
    "geometry.bell_slices": [3, 64],
}
for _kind in ("structural", "radial", "shear", "drag", "center"):
    PARAM_BOUNDS[f"ks.{_kind}"] = [0.0, 1e5]
    PARAM_BOUNDS[f"kd.{_kind}"] = [0.0, 1e3]


class CommandProcessor:
    """Owns command application for one session.

    The ``paused`` flag is honored by the serving loop; ``step`` commands
    run immediately regardless of it.
    """

    def __init__(self, session: Session):
        self.session = session
        self.paused = False
        self._ui_drag_index: int | None = None

    def handle(self, cmd) -> dict:
        if not isinstance(cmd, dict) or "cmd" not in cmd:
            return {"ok": False, "error": "unknown-command"}
        handler = getattr(self, f"_cmd_{cmd['cmd']}", None)
        if handler is None:
            return {"ok": False, "error": "unknown-command"}
        try:
            return handler(cmd)
        except SoftbodyError as e:
            return {"ok": False, "error": e.code, "message": str(e)}
        except (KeyError, TypeError, ValueError) as e:
            return {"ok": False, "error": "bad-command", "message": str(e)}

    # -- parameters -------------------------------------------------------

    def _cmd_set_param(self, cmd) -> dict:
        name = cmd["name"]
        value = cmd["value"]
        session = self.session
        if name == "integrator":
            return self._cmd_set_integrator({"value": value})
        if name.startswith("geometry."):
            old = session.params.get_param(name)
            session.params.set_param(name, value)
            try:
                self._rebuild_geometry()
            except SoftbodyError:
                session.params.set_param(name, old)
                raise
        elif name == "default_mass":
            session.params.set_param(name, value)
            # the uniform-mass knob re-weights every existing particle
            for body in session.bodies:
                for p in body.particles:
                    p.mass = session.params.default_mass
        elif name == "gas_constant":
            session.params.set_param(name, value)
            gas = session.params.gas_constant
            for body in session.bodies:
                if body.dimensionality != "d1" and body.faces:
                    body.gas_constant = gas
            for ctrl in session.controllers:
                if isinstance(ctrl, SwimController):
                    ctrl.base_gas = gas
        elif name in ("ks.drag", "kd.drag"):
            # existing anchor springs follow the live coefficient
            session.params.set_param(name, value)
            for d in session.drags:
                if name == "ks.drag":
                    d.ks = session.params.ks.drag
                else:
                    d.kd = session.params.kd.drag
        else:
            session.params.set_param(name, value)
        return {"ok": True, "name": name, "value": session.params.get_param(name)}

    def _cmd_list_params(self, cmd) -> dict:
        items = self.session.params.param_items()
        return {
            "ok": True,
            "params": items,
            "bounds": {k: PARAM_BOUNDS[k] for k in items if k in PARAM_BOUNDS},
        }

    def _cmd_set_integrator(self, cmd) -> dict:
        self.session.set_integrator(cmd["value"])
        return {"ok": True, "integrator": cmd["value"]}

    def _rebuild_geometry(self) -> None:
        """Rebuild all bodies from the session's scenario with the current
        geometry params, preserving each body's centroid; on failure the
        session is left unchanged."""
        from . import scenarios

        session = self.session
        if session.scenario is None:
            raise SoftbodyError("no-scenario", "session has no scenario to rebuild from")
        fresh = scenarios.build(session.scenario, session.params)
        for name in session.spawned:
            spawn_into(fresh, name)
        for old, new in zip(session.bodies, fresh.bodies):
            offset = old.centroid() - new.centroid()
            for p in new.particles:
                p.position.x += offset.x
                p.position.y += offset.y
                p.position.z += offset.z
        session.bodies = fresh.bodies
        session.drags = fresh.drags
        session.controllers = fresh.controllers
        session.tentacles = fresh.tentacles
        self._ui_drag_index = None

    # -- interaction ------------------------------------------------------

    def _cmd_drag(self, cmd) -> dict:
        session = self.session
        phase = cmd["phase"]
        if phase == "start":
            if not session.bodies:
                return {"ok": False, "error": "empty-session"}
            point = Vec3(float(cmd["x"]), float(cmd["y"]), float(cmd.get("z", 0.0)))
            best = None
            for bi, body in enumerate(session.bodies):
                if not body.particles:
                    continue
                pi = nearest_particle(body, point)
                d = (body.particles[pi].position - point).norm()
                if best is None or d < best[0]:
                    best = (d, bi, pi)
            _, bi, pi = best
            if self._ui_drag_index is None:
                self._ui_drag_index = len(session.drags)
                session.drags.append(Drag())
            drag = session.drags[self._ui_drag_index]
            drag.body = bi
            drag.target = pi
            drag.anchor = point
            drag.ks = session.params.ks.drag
            drag.kd = session.params.kd.drag
            drag.active = True
            return {"ok": True, "body": bi, "particle": pi}
        if self._ui_drag_index is None:
            return {"ok": False, "error": "no-active-drag"}
        drag = session.drags[self._ui_drag_index]
        if phase == "move":
            drag.anchor = Vec3(float(cmd["x"]), float(cmd["y"]), float(cmd.get("z", 0.0)))
            return {"ok": True}
        if phase == "end":
            drag.active = False
            return {"ok": True}
        return {"ok": False, "error": "bad-command"}

    # -- session control ---------------------------------------------------

    def _cmd_pause(self, cmd) -> dict:
        self.paused = True
        return {"ok": True, "paused": True}

    def _cmd_resume(self, cmd) -> dict:
        self.paused = False
        return {"ok": True, "paused": False}

    def _cmd_step(self, cmd) -> dict:
        n = int(cmd.get("n", 1))
        if n < 0:
            return {"ok": False, "error": "bad-command"}
        self.session.run(n)
        return {"ok": True, "stepped": n, "t": self.session.clock.t}

    def _cmd_spawn(self, cmd) -> dict:
        added = spawn_into(self.session, cmd["scenario"])
        self.session.spawned.append(cmd["scenario"])
        return {"ok": True, "bodies_added": added}

    def _cmd_select_world(self, cmd) -> dict:
        world = BoxWorld(Vec3.from_list(cmd["min"]), Vec3.from_list(cmd["max"]))
        self.session.world = world
        return {"ok": True}

    def _cmd_snapshot_request(self, cmd) -> dict:
        return {"ok": True, "snapshot": snapshot(self.session)}


def spawn_into(session: Session, scenario_name: str) -> int:
    """Append another scenario's bodies (and wiring) into a running session."""
    from . import scenarios

    extra = scenarios.build(scenario_name, session.params)
    body_offset = len(session.bodies)
    drag_offset = len(session.drags)
    for body in extra.bodies:
        session.bodies.append(body)
    for drag in extra.drags:
        drag.body += body_offset
        session.drags.append(drag)
    for ctrl in extra.controllers:
        ctrl.body += body_offset
        ctrl.drag_index += drag_offset
        session.controllers.append(ctrl)
    for chain in extra.tentacles:
        chain.body += body_offset
        session.tentacles.append(chain)
    return len(extra.bodies)


def build_frame(session: Session) -> dict:
    """The broadcast frame: positions, spring endpoints, tentacle joints,
    and the rolling statistics."""
    bodies = []
    for bi, body in enumerate(session.bodies):
        bodies.append({
            "id": bi,
            "particles": [[p.position.x, p.position.y, p.position.z]
                          for p in body.particles],
            "springs": [[s.p1, s.p2] for s in body.springs],
            "tentacles": [
                [[j.x, j.y, j.z] for j in chain.joints]
                for chain in session.tentacles if chain.body == bi
            ],
        })
    stats = session.stats
    return {
        "type": "frame",
        "t": session.clock.t,
        "bodies": bodies,
        "stats": {
            "steps_per_s": round(stats.steps_per_s, 1),
            "step_ms": round(stats.last_step_ms, 3),
            "degenerate_springs": stats.degenerate_springs,
        },
    }
