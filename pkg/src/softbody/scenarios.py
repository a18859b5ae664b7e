"""Built-in scenario assemblies and JSON scenario file loading.

A scenario builds a fully wired session: bodies placed in a world, drags
bound, controllers attached.  Scenario files name a builder plus parameter
overrides (dotted names) and, for the towing scenario, an optional control
point list.
"""

from __future__ import annotations

import json

from .collision import BoxWorld
from .curves import BezierPath, CurveDrive
from .errors import SoftbodyError
from .geometry import (BellSpec, RingSpec, SphereSpec, build_bell_3d,
                       build_chain_1d, build_ring_2d, build_sphere_3d,
                       translate)
from .jellyfish import build_jellyfish_2d, build_jellyfish_3d
from .model import Drag, SimParams, Vec3
from .session import Session

DEFAULT_TOW_POINTS = [
    Vec3(0.0, 2.5, 0.0), Vec3(1.0, 3.5, 0.0), Vec3(2.0, 1.5, 0.0), Vec3(3.0, 2.5, 0.0),
    Vec3(3.6, 3.2, 0.0), Vec3(4.2, 1.8, 0.0), Vec3(4.5, 2.5, 0.0),
]
TOW_DURATION = 6.0
TOW_KS = 3000.0
TOW_KD = 50.0
# The stiff tow spring needs a finer step than the general default to stay
# inside the explicit integrators' stability envelope.
TOW_DT = 0.002


def _session(params, bodies, drags=None, controllers=None, tentacles=None,
             world=None, scenario=None):
    return Session(params=params, world=world, bodies=bodies,
                   drags=drags or [], controllers=controllers or [],
                   tentacles=tentacles or [], scenario=scenario)


def _chain1d(params: SimParams) -> Session:
    body = build_chain_1d(10, 0.2, params)
    translate(body, Vec3(-0.9, 5.0, 0.0))
    return _session(params, [body])


def _ring2d(params: SimParams, with_center=False) -> Session:
    spec = RingSpec(particles_per_layer=params.geometry.particles_per_layer_2d,
                    with_center_particle=with_center)
    body = build_ring_2d(spec, params)
    translate(body, Vec3(0.0, 2.5, 0.0))
    body.gas_constant = params.gas_constant
    return _session(params, [body])


def _sphere3d(params: SimParams) -> Session:
    spec = SphereSpec(iterations=params.geometry.subdivision_iterations_3d)
    body = build_sphere_3d(spec, params)
    translate(body, Vec3(0.0, 3.0, 0.0))
    body.gas_constant = params.gas_constant
    return _session(params, [body])


def _jellyfish2d(params: SimParams) -> Session:
    body, controller, chains = build_jellyfish_2d(params)
    translate(body, Vec3(-2.0, 3.0, 0.0))
    drag = Drag(ks=params.ks.drag, kd=params.kd.drag)
    return _session(params, [body], drags=[drag], controllers=[controller],
                    tentacles=chains)


def _jellyfish3d(params: SimParams) -> Session:
    body, controller, chains = build_jellyfish_3d(params)
    translate(body, Vec3(0.0, 3.0, 0.0))
    drag = Drag(ks=params.ks.drag, kd=params.kd.drag)
    return _session(params, [body], drags=[drag], controllers=[controller],
                    tentacles=chains)


def _bezier_tow(params: SimParams, control_points=None, duration=None) -> Session:
    params.dt = min(params.dt, TOW_DT)
    points = control_points if control_points else [p.copy() for p in DEFAULT_TOW_POINTS]
    spec = RingSpec(particles_per_layer=params.geometry.particles_per_layer_2d,
                    outer_radius=0.6, inner_radius=0.42, with_center_particle=True)
    body = build_ring_2d(spec, params)
    start = points[0]
    center = body.particles[body.layers.center].position
    translate(body, start - center)
    body.gas_constant = params.gas_constant
    drag = Drag(ks=TOW_KS, kd=TOW_KD)
    drive = CurveDrive(path=BezierPath(points),
                       duration=duration if duration else TOW_DURATION,
                       ks=TOW_KS, kd=TOW_KD)
    return _session(params, [body], drags=[drag], controllers=[drive])


def _bubbles_box(params: SimParams) -> Session:
    bodies = []
    placements = [(-1.5, 2.0, 0.45), (0.0, 3.0, 0.55), (1.5, 2.4, 0.4)]
    for x, y, radius in placements:
        spec = RingSpec(particles_per_layer=max(8, params.geometry.particles_per_layer_2d // 2),
                        outer_radius=radius, inner_radius=0.7 * radius)
        body = build_ring_2d(spec, params)
        translate(body, Vec3(x, y, 0.0))
        body.gas_constant = params.gas_constant * radius
        bodies.append(body)
    return _session(params, bodies)


SCENARIOS = {
    "chain1d": _chain1d,
    "ring2d": lambda p: _ring2d(p, with_center=False),
    "ring2d-center": lambda p: _ring2d(p, with_center=True),
    "sphere3d": _sphere3d,
    "jellyfish2d": _jellyfish2d,
    "jellyfish3d": _jellyfish3d,
    "bezier-tow": _bezier_tow,
    "bubbles-box": _bubbles_box,
}


def scenario_names() -> list:
    return list(SCENARIOS)


def build(name: str, params: SimParams | None = None) -> Session:
    """Build a named builtin or a JSON scenario file (by path)."""
    if params is None:
        params = SimParams()
    if name in SCENARIOS:
        session = SCENARIOS[name](params)
        session.scenario = name
        return session
    if name.endswith(".json"):
        return _from_file(name, params)
    raise SoftbodyError(
        "unknown-scenario",
        f"unknown scenario {name!r}; valid: {', '.join(scenario_names())} or a .json file")


def _from_file(path: str, params: SimParams) -> Session:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SoftbodyError("unknown-scenario", f"cannot load scenario file {path}: {e}") from e
    builder = doc.get("builder")
    if builder not in SCENARIOS:
        raise SoftbodyError(
            "unknown-scenario",
            f"scenario file names unknown builder {builder!r}; valid: {', '.join(scenario_names())}")
    for name, value in doc.get("params", {}).items():
        params.set_param(name, value)
    if builder == "bezier-tow" and "control_points" in doc:
        points = [Vec3.from_list(p) for p in doc["control_points"]]
        session = _bezier_tow(params, control_points=points,
                              duration=doc.get("duration"))
    else:
        session = SCENARIOS[builder](params)
    session.scenario = builder
    return session
