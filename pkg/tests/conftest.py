import math

import pytest

from softbody.model import (Layers, Particle, SimParams, SoftBody, Spring,
                            SpringCoeffs, Vec3)


@pytest.fixture
def zero_g_params():
    return SimParams(gravity=Vec3(0.0, 0.0, 0.0))


def make_unit_square(ccw=True, gas_constant=0.0):
    """Closed 2D loop over the unit square, CCW by default."""
    from softbody.model import Face
    pts = [Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)]
    particles = [Particle(i, pt, mass=1.0) for i, pt in enumerate(pts)]
    order = [0, 1, 2, 3] if ccw else [0, 3, 2, 1]
    faces = [Face((order[i], order[(i + 1) % 4])) for i in range(4)]
    return SoftBody("d2", particles, [], faces, Layers(outer=list(range(4))),
                    gas_constant=gas_constant)


def make_oscillator(dt, x0=1.0, v0=0.0, ks=1.0, kd=0.0, mass=1.0):
    """Pinned anchor at the origin plus one free particle on a rest-0 spring:
    the analytic harmonic oscillator x(t) = cos(t) for ks = m = 1."""
    anchor = Particle(0, Vec3(0.0, 0.0, 0.0), pinned=True, mass=1.0)
    mover = Particle(1, Vec3(x0, 0.0, 0.0), Vec3(v0, 0.0, 0.0), mass=mass)
    spring = Spring(0, 0, 1, rest_length=0.0, ks=ks, kd=kd, kind="structural")
    body = SoftBody("d1", [anchor, mover], [spring], [], Layers(outer=[0, 1]))
    params = SimParams(
        dt=dt,
        gravity=Vec3(0.0, 0.0, 0.0),
        default_mass=mass,
        ks=SpringCoeffs(structural=ks, radial=0, shear=0, drag=0, center=0),
        kd=SpringCoeffs(structural=kd, radial=0, shear=0, drag=0, center=0),
    )
    return body, params


def oscillator_energy(body, ks=1.0):
    p = body.particles[1]
    return 0.5 * p.mass * p.velocity.dot(p.velocity) + 0.5 * ks * p.position.dot(p.position)


def max_net_force(body):
    return max((p.total_force().norm() for p in body.particles), default=0.0)


def close(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)
