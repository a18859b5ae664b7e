"""Pluggable explicit ODE integrators: euler, midpoint, feynman, rk4.

All four advance the coupled (position, velocity) system of one body by a
fixed dt, evaluating the full force accumulation at every derivative stage.
Pinned particles are never moved.  The feynman integrator is a staggered
leapfrog ("step and a half" velocities); its half-step buffer lives on the
body so snapshots can carry it, and it re-bootstraps whenever the buffer is
missing (first use, or after an integrator switch cleared it).
"""

from __future__ import annotations

from .errors import SoftbodyError
from .forces import accumulate_all
from .model import SimParams, SoftBody, Vec3


def derivatives(body: SoftBody, params: SimParams, drags=()) -> list:
    """Per-particle (dx, dv) at the body's current state.

    dx is the velocity, dv the net accumulated force over mass; pinned
    particles report zeros.
    """
    accumulate_all(body, params, drags)
    out = []
    for p in body.particles:
        if p.pinned:
            out.append((Vec3(), Vec3()))
            continue
        f = p.total_force()
        inv_m = 1.0 / p.mass
        out.append((p.velocity.copy(), Vec3(f.x * inv_m, f.y * inv_m, f.z * inv_m)))
    return out


def _save_state(body: SoftBody) -> list:
    return [(p.position.copy(), p.velocity.copy()) for p in body.particles]


def _load_state(body: SoftBody, state) -> None:
    for p, (x, v) in zip(body.particles, state):
        p.position.set(x.x, x.y, x.z)
        p.velocity.set(v.x, v.y, v.z)


def step_euler(body: SoftBody, params: SimParams, drags, dt: float) -> SoftBody:
    """Explicit Euler: both updates use the pre-step derivative.

    Deliberately not semi-implicit; the scheme's marginal stability is part
    of what the integrator comparison is meant to show.
    """
    derivs = derivatives(body, params, drags)
    for p, (dx, dv) in zip(body.particles, derivs):
        if p.pinned:
            continue
        x = p.position
        v = p.velocity
        x.x += dx.x * dt
        x.y += dx.y * dt
        x.z += dx.z * dt
        v.x += dv.x * dt
        v.y += dv.y * dt
        v.z += dv.z * dt
    return body


def step_midpoint(body: SoftBody, params: SimParams, drags, dt: float) -> SoftBody:
    """Classical RK2: evaluate at a half Euler step, advance with that slope."""
    start = _save_state(body)
    k1 = derivatives(body, params, drags)
    half = 0.5 * dt
    for p, (dx, dv) in zip(body.particles, k1):
        if p.pinned:
            continue
        p.position.x += dx.x * half
        p.position.y += dx.y * half
        p.position.z += dx.z * half
        p.velocity.x += dv.x * half
        p.velocity.y += dv.y * half
        p.velocity.z += dv.z * half
    k2 = derivatives(body, params, drags)
    _load_state(body, start)
    for p, (dx, dv) in zip(body.particles, k2):
        if p.pinned:
            continue
        p.position.x += dx.x * dt
        p.position.y += dx.y * dt
        p.position.z += dx.z * dt
        p.velocity.x += dv.x * dt
        p.velocity.y += dv.y * dt
        p.velocity.z += dv.z * dt
    return body


def step_feynman(body: SoftBody, params: SimParams, drags, dt: float) -> SoftBody:
    """Staggered leapfrog with half-step velocities.

    Bootstrap on first use: v_half = v + a(x) * dt/2.  Every step then moves
    positions with v_half, re-evaluates the acceleration at the new
    positions (damping sees the half-step velocity, a documented
    approximation), advances v_half a full dt, and reports the integer-step
    velocity as v_half - a * dt/2.
    """
    parts = body.particles
    if body.half_step_velocities is None or len(body.half_step_velocities) != len(parts):
        derivs = derivatives(body, params, drags)
        half = 0.5 * dt
        body.half_step_velocities = [
            Vec3(p.velocity.x + dv.x * half,
                 p.velocity.y + dv.y * half,
                 p.velocity.z + dv.z * half)
            for p, (_, dv) in zip(parts, derivs)
        ]
    v_half = body.half_step_velocities
    for p, vh in zip(parts, v_half):
        if p.pinned:
            continue
        p.position.x += vh.x * dt
        p.position.y += vh.y * dt
        p.position.z += vh.z * dt
        # Damping terms during the next evaluation read the staggered value.
        p.velocity.set(vh.x, vh.y, vh.z)
    derivs = derivatives(body, params, drags)
    half = 0.5 * dt
    for p, vh, (_, dv) in zip(parts, v_half, derivs):
        if p.pinned:
            continue
        vh.x += dv.x * dt
        vh.y += dv.y * dt
        vh.z += dv.z * dt
        p.velocity.set(vh.x - dv.x * half, vh.y - dv.y * half, vh.z - dv.z * half)
    return body


def step_rk4(body: SoftBody, params: SimParams, drags, dt: float) -> SoftBody:
    """Classical 4-stage Runge-Kutta over the coupled (x, v) system."""
    start = _save_state(body)
    half = 0.5 * dt

    def displace(base, derivs, h):
        for p, (x0, v0), (dx, dv) in zip(body.particles, base, derivs):
            if p.pinned:
                continue
            p.position.set(x0.x + dx.x * h, x0.y + dx.y * h, x0.z + dx.z * h)
            p.velocity.set(v0.x + dv.x * h, v0.y + dv.y * h, v0.z + dv.z * h)

    k1 = derivatives(body, params, drags)
    displace(start, k1, half)
    k2 = derivatives(body, params, drags)
    displace(start, k2, half)
    k3 = derivatives(body, params, drags)
    displace(start, k3, dt)
    k4 = derivatives(body, params, drags)
    sixth = dt / 6.0
    for p, (x0, v0), (d1, a1), (d2, a2), (d3, a3), (d4, a4) in zip(
            body.particles, start, k1, k2, k3, k4):
        if p.pinned:
            p.position.set(x0.x, x0.y, x0.z)
            p.velocity.set(v0.x, v0.y, v0.z)
            continue
        p.position.set(
            x0.x + sixth * (d1.x + 2.0 * (d2.x + d3.x) + d4.x),
            x0.y + sixth * (d1.y + 2.0 * (d2.y + d3.y) + d4.y),
            x0.z + sixth * (d1.z + 2.0 * (d2.z + d3.z) + d4.z),
        )
        p.velocity.set(
            v0.x + sixth * (a1.x + 2.0 * (a2.x + a3.x) + a4.x),
            v0.y + sixth * (a1.y + 2.0 * (a2.y + a3.y) + a4.y),
            v0.z + sixth * (a1.z + 2.0 * (a2.z + a3.z) + a4.z),
        )
    return body


INTEGRATORS = {
    "euler": step_euler,
    "midpoint": step_midpoint,
    "feynman": step_feynman,
    "rk4": step_rk4,
}


def select_integrator(integrator_id: str):
    """Look up a step function; unknown ids are rejected.

    Switching integrators mid-run must also clear each body's half-step
    buffer so feynman re-bootstraps; the session handles that when it
    changes its params.
    """
    try:
        return INTEGRATORS[integrator_id]
    except KeyError:
        raise SoftbodyError(
            "unknown-integrator",
            f"unknown integrator {integrator_id!r}; known: {', '.join(INTEGRATORS)}",
        ) from None
