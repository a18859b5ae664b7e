"""Force accumulators: gravity, springs, gas pressure, and drag anchors.

All accumulators add into the particles' per-source force vectors and never
touch positions or velocities.  The combined pass (:func:`accumulate_all`)
runs them in a fixed order so repeated runs over the same state are
bit-identical.

Spring law: linear Hooke plus damping projected on the spring axis,
``f1 = -(ks*(L - rest) + kd*((v1 - v2) . u)) * u`` with ``u = (x1 - x2)/L``.

Pressure law: scalar pressure ``P = gas_constant / enclosed_measure`` (an
ideal-gas-style inverse law), applied per face as ``P * measure(face)`` along
the outward face normal and split equally among the face's particles.
Pressure acts on the body's face set, i.e. the closed outer surface only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from time import perf_counter

from .errors import SoftbodyError
from .model import Drag, SimParams, SoftBody, Vec3, enclosed_measure, reset_forces


@dataclass
class ForceReport:
    """Per-source force totals over a whole body, for diagnostics and the
    momentum-balance checks."""

    totals: dict = field(default_factory=dict)
    net: Vec3 = field(default_factory=Vec3)
    max_contribution: dict = field(default_factory=dict)


def accumulate_gravity(body: SoftBody, gravity: Vec3) -> SoftBody:
    """Add ``mass * gravity`` to every non-pinned particle's gravity channel."""
    gx, gy, gz = gravity.x, gravity.y, gravity.z
    for p in body.particles:
        if p.pinned:
            continue
        f = p.force_by_source["gravity"]
        m = p.mass
        f.x += m * gx
        f.y += m * gy
        f.z += m * gz
    return body


def spring_force(x1: Vec3, x2: Vec3, v1: Vec3, v2: Vec3,
                 rest: float, ks: float, kd: float) -> tuple:
    """Force pair exerted by one damped spring; ``f2 == -f1`` always.

    Raises ``coincident-endpoints`` when the endpoints coincide; during a
    live accumulation pass the caller substitutes zero force instead (see
    :func:`accumulate_all`).
    """
    dx = x1.x - x2.x
    dy = x1.y - x2.y
    dz = x1.z - x2.z
    length = math.sqrt(dx * dx + dy * dy + dz * dz)
    if length == 0.0:
        raise SoftbodyError("coincident-endpoints", "spring endpoints coincide")
    ux = dx / length
    uy = dy / length
    uz = dz / length
    rel = (v1.x - v2.x) * ux + (v1.y - v2.y) * uy + (v1.z - v2.z) * uz
    mag = -(ks * (length - rest) + kd * rel)
    f1 = Vec3(mag * ux, mag * uy, mag * uz)
    return f1, Vec3(-f1.x, -f1.y, -f1.z)


def _accumulate_springs(body: SoftBody, params: SimParams) -> None:
    # Coefficients come from the live params by spring kind, not from the
    # values frozen on the Spring at build time: that is the runtime LOD
    # contract. Zero-length springs contribute nothing and are counted.
    ks_by_kind = {k: params.ks.get(k) for k in ("structural", "radial", "shear", "drag", "center")}
    kd_by_kind = {k: params.kd.get(k) for k in ("structural", "radial", "shear", "drag", "center")}
    parts = body.particles
    degenerate = 0
    for s in body.springs:
        pa = parts[s.p1]
        pb = parts[s.p2]
        a = pa.position
        b = pb.position
        dx = a.x - b.x
        dy = a.y - b.y
        dz = a.z - b.z
        length = math.sqrt(dx * dx + dy * dy + dz * dz)
        if length == 0.0:
            degenerate += 1
            continue
        va = pa.velocity
        vb = pb.velocity
        ux = dx / length
        uy = dy / length
        uz = dz / length
        rel = (va.x - vb.x) * ux + (va.y - vb.y) * uy + (va.z - vb.z) * uz
        mag = -(ks_by_kind[s.kind] * (length - s.rest_length) + kd_by_kind[s.kind] * rel)
        fx = mag * ux
        fy = mag * uy
        fz = mag * uz
        fa = pa.force_by_source["spring"]
        fa.x += fx
        fa.y += fy
        fa.z += fz
        fb = pb.force_by_source["spring"]
        fb.x -= fx
        fb.y -= fy
        fb.z -= fz
    body.degenerate_spring_count = degenerate


def accumulate_pressure(body: SoftBody, gas_constant: float) -> SoftBody:
    """Add the internal gas pressure forces over the body's closed surface."""
    if body.dimensionality == "d1":
        raise SoftbodyError("pressure-undefined-1d", "1D bodies carry no pressure")
    if gas_constant == 0.0:
        return body
    measure = enclosed_measure(body)
    if measure <= 0.0:
        raise SoftbodyError("inverted-body", f"enclosed measure is {measure}, body is inverted")
    pressure = gas_constant / measure
    parts = body.particles
    if body.dimensionality == "d2":
        for f in body.faces:
            i, j = f.indices
            a = parts[i].position
            b = parts[j].position
            # Outward normal of a CCW edge scaled by edge length: (dy, -dx).
            nx = (b.y - a.y) * pressure
            ny = (a.x - b.x) * pressure
            fa = parts[i].force_by_source["pressure"]
            fb = parts[j].force_by_source["pressure"]
            fa.x += 0.5 * nx
            fa.y += 0.5 * ny
            fb.x += 0.5 * nx
            fb.y += 0.5 * ny
        return body
    for f in body.faces:
        i, j, k = f.indices
        a = parts[i].position
        b = parts[j].position
        c = parts[k].position
        abx = b.x - a.x
        aby = b.y - a.y
        abz = b.z - a.z
        acx = c.x - a.x
        acy = c.y - a.y
        acz = c.z - a.z
        # Half cross product = area-weighted outward normal of a CCW triangle.
        sx = 0.5 * (aby * acz - abz * acy) * pressure
        sy = 0.5 * (abz * acx - abx * acz) * pressure
        sz = 0.5 * (abx * acy - aby * acx) * pressure
        third = 1.0 / 3.0
        for idx in f.indices:
            fv = parts[idx].force_by_source["pressure"]
            fv.x += sx * third
            fv.y += sy * third
            fv.z += sz * third
    return body


def accumulate_drag(body: SoftBody, drag: Drag) -> SoftBody:
    """Apply one anchor spring's pull to its target particle.

    The anchor is a virtual zero-velocity, zero-rest-length endpoint; only
    the particle side of the force pair lands on the body.
    """
    if not (0 <= drag.target < len(body.particles)):
        raise SoftbodyError("bad-target", f"drag target {drag.target} out of range")
    if not drag.active:
        return body
    p = body.particles[drag.target]
    try:
        f1, _ = spring_force(p.position, drag.anchor, p.velocity, Vec3(), 0.0, drag.ks, drag.kd)
    except SoftbodyError:
        # Particle sitting exactly on the anchor: zero extension, zero force.
        return body
    fv = p.force_by_source["drag"]
    fv.x += f1.x
    fv.y += f1.y
    fv.z += f1.z
    return body


def accumulate_all(body: SoftBody, params: SimParams, drags=()) -> SoftBody:
    """The full accumulation pass of one derivative evaluation.

    Fixed order: reset, gravity, springs, pressure (2D/3D only), active
    drags.  The order is physically irrelevant (pure sums) but pinned down
    so dumps are bit-stable.  Collision forces are added separately after
    integration.
    """
    t0 = perf_counter()
    reset_forces(body)
    accumulate_gravity(body, params.gravity)
    _accumulate_springs(body, params)
    if body.dimensionality != "d1" and body.gas_constant > 0.0:
        accumulate_pressure(body, body.gas_constant)
    for d in drags:
        if d.active:
            accumulate_drag(body, d)
    body.accumulate_seconds += perf_counter() - t0
    return body


def force_report(body: SoftBody) -> ForceReport:
    """Sum the current accumulators per source across the whole body."""
    report = ForceReport()
    for src in ("gravity", "spring", "pressure", "drag", "collision"):
        total = Vec3()
        biggest = 0.0
        for p in body.particles:
            f = p.force_by_source[src]
            total.x += f.x
            total.y += f.y
            total.z += f.z
            mag = f.norm()
            if mag > biggest:
                biggest = mag
        report.totals[src] = total
        report.max_contribution[src] = biggest
        report.net.x += total.x
        report.net.y += total.y
        report.net.z += total.z
    return report
