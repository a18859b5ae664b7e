import math

import pytest

from softbody.errors import SoftbodyError
from softbody.integrators import (INTEGRATORS, derivatives, select_integrator,
                                  step_euler, step_feynman, step_midpoint,
                                  step_rk4)
from softbody.model import (Layers, Particle, SimParams, SoftBody, Vec3)
from softbody.session import Session

from conftest import make_oscillator, oscillator_energy


def free_particle(v=(0.0, 0.0, 0.0), x=(0.0, 0.0, 0.0), mass=1.0):
    body = SoftBody("d1", [Particle(0, Vec3(*x), Vec3(*v), mass=mass)], [], [])
    params = SimParams(gravity=Vec3(0.0, 0.0, 0.0))
    return body, params


def oscillator_error(integrator_id, dt, t_end=1.0):
    body, params = make_oscillator(dt)
    step = INTEGRATORS[integrator_id]
    for _ in range(round(t_end / dt)):
        step(body, params, (), dt)
    return abs(body.particles[1].position.x - math.cos(t_end))


class TestDerivatives:
    def test_force_free(self):
        body, params = free_particle(v=(1.0, 2.0, 3.0))
        (dx, dv), = derivatives(body, params)
        assert dx == Vec3(1.0, 2.0, 3.0)
        assert dv == Vec3(0.0, 0.0, 0.0)

    def test_acceleration_is_force_over_mass(self):
        body, params = free_particle(mass=2.0)
        params.gravity = Vec3(0.0, -9.81, 0.0)
        (dx, dv), = derivatives(body, params)
        assert dv == Vec3(0.0, -9.81, 0.0)  # (0, -19.62, 0) N / 2 kg

    def test_pinned_reports_zero(self):
        body, params = free_particle(v=(1.0, 0.0, 0.0))
        body.particles[0].pinned = True
        params.gravity = Vec3(0.0, -9.81, 0.0)
        (dx, dv), = derivatives(body, params)
        assert dx == Vec3(0.0, 0.0, 0.0)
        assert dv == Vec3(0.0, 0.0, 0.0)


class TestEuler:
    def test_drift_uses_pre_step_velocity(self):
        body, params = free_particle(v=(1.0, 0.0, 0.0))
        step_euler(body, params, (), 0.5)
        assert body.particles[0].position == Vec3(0.5, 0.0, 0.0)
        assert body.particles[0].velocity == Vec3(1.0, 0.0, 0.0)

    def test_fixed_point(self):
        body, params = free_particle()
        step_euler(body, params, (), 0.25)
        assert body.particles[0].position == Vec3(0.0, 0.0, 0.0)
        assert body.particles[0].velocity == Vec3(0.0, 0.0, 0.0)

    def test_oscillator_single_step(self):
        body, params = make_oscillator(0.1)
        step_euler(body, params, (), 0.1)
        p = body.particles[1]
        assert p.position.x == pytest.approx(1.0, abs=1e-15)
        assert p.velocity.x == pytest.approx(-0.1, abs=1e-15)


class TestMidpoint:
    def test_exact_for_constant_velocity(self):
        body, params = free_particle(v=(1.0, 0.0, 0.0))
        step_midpoint(body, params, (), 1.0)
        assert body.particles[0].position == Vec3(1.0, 0.0, 0.0)

    def test_beats_euler_against_fine_reference(self):
        # Reference trajectory: brute-force explicit Euler at dt = 1e-5.
        body, params = make_oscillator(1e-5)
        for _ in range(10000):
            step_euler(body, params, (), 1e-5)
        reference = body.particles[1].position.x

        errors = {}
        for integ in ("euler", "midpoint"):
            body, params = make_oscillator(0.1)
            INTEGRATORS[integ](body, params, (), 0.1)
            errors[integ] = abs(body.particles[1].position.x - reference)
        assert errors["midpoint"] < errors["euler"]

    def test_tiny_dt_continuity(self):
        body, params = make_oscillator(1e-12)
        step_midpoint(body, params, (), 1e-12)
        p = body.particles[1]
        assert abs(p.position.x - 1.0) < 1e-9
        assert abs(p.velocity.x) < 1e-9


class TestFeynman:
    def test_exact_for_constant_velocity(self):
        body, params = free_particle(v=(1.0, 0.0, 0.0))
        for k in range(3):
            step_feynman(body, params, (), 1.0)
            assert body.particles[0].position.x == pytest.approx(k + 1.0, abs=1e-15)

    def test_energy_drift_bounded_while_euler_is_not(self):
        drift = {}
        for integ in ("feynman", "euler"):
            body, params = make_oscillator(0.01)
            e0 = oscillator_energy(body)
            for _ in range(1000):
                INTEGRATORS[integ](body, params, (), 0.01)
            drift[integ] = abs(oscillator_energy(body) - e0) / e0
        assert drift["feynman"] < 0.01
        assert drift["euler"] > 0.01

    def test_first_step_matches_velocity_verlet_position(self):
        # Hand-expanded Verlet: x1 = x0 + v0 dt + a(x0) dt^2 / 2 with a = -x0.
        dt = 0.05
        body, params = make_oscillator(dt)
        step_feynman(body, params, (), dt)
        expected = 1.0 + 0.0 * dt + (-1.0) * dt * dt / 2.0
        assert body.particles[1].position.x == pytest.approx(expected, abs=1e-15)
        # Reported integer-step velocity: v0 + (a(x0) + a(x1)) dt / 2.
        expected_v = ((-1.0) + (-expected)) * dt / 2.0
        assert body.particles[1].velocity.x == pytest.approx(expected_v, abs=1e-15)


class TestRK4:
    def test_exact_for_constant_velocity(self):
        body, params = free_particle(v=(0.0, 2.0, 0.0))
        step_rk4(body, params, (), 0.5)
        assert body.particles[0].position == Vec3(0.0, 1.0, 0.0)

    def test_matches_analytic_cosine(self):
        assert oscillator_error("rk4", 0.05) < 1e-5

    def test_halving_dt_shrinks_error_16x(self):
        ratio = oscillator_error("rk4", 0.02) / oscillator_error("rk4", 0.01)
        assert 10.0 <= ratio <= 24.0


class TestConvergenceOrders:
    @pytest.mark.parametrize("integ,lo,hi", [
        ("euler", 1.5, 3.0),
        ("midpoint", 3.0, 6.0),
        ("feynman", 3.0, 6.0),
        ("rk4", 10.0, 24.0),
    ])
    def test_halving_ratio(self, integ, lo, hi):
        ratio = oscillator_error(integ, 0.02) / oscillator_error(integ, 0.01)
        assert lo <= ratio <= hi


class TestCommonContracts:
    @pytest.mark.parametrize("integ", list(INTEGRATORS))
    def test_pinned_particles_never_move(self, integ):
        body, params = make_oscillator(0.05)
        anchor = body.particles[0]
        for _ in range(50):
            INTEGRATORS[integ](body, params, (), 0.05)
        assert anchor.position == Vec3(0.0, 0.0, 0.0)
        assert anchor.velocity == Vec3(0.0, 0.0, 0.0)

    @pytest.mark.parametrize("integ", list(INTEGRATORS))
    def test_bit_identical_given_equal_state(self, integ):
        def run():
            body, params = make_oscillator(0.03)
            for _ in range(40):
                INTEGRATORS[integ](body, params, (), 0.03)
            p = body.particles[1]
            return (p.position.x, p.position.y, p.velocity.x, p.velocity.y)
        assert run() == run()


class TestSelection:
    def test_lookup(self):
        assert select_integrator("rk4") is step_rk4

    def test_unknown_rejected(self):
        with pytest.raises(SoftbodyError) as e:
            select_integrator("verlet")
        assert e.value.code == "unknown-integrator"

    def test_switch_resets_feynman_bootstrap(self):
        body, params = make_oscillator(0.05)
        params.integrator = "feynman"
        session = Session(params=params, bodies=[body])
        session.world.min.set(-10, -10, -10)
        session.step()
        assert body.half_step_velocities is not None
        session.set_integrator("euler")
        assert body.half_step_velocities is None
        session.set_integrator("feynman")
        session.step()  # re-bootstraps without error
        assert body.half_step_velocities is not None
