import random

import pytest

from softbody.collision import (BoxWorld, DETECTORS, resolve_box_penalty,
                                select_detector)
from softbody.errors import SoftbodyError
from softbody.model import Particle, SoftBody, Vec3


def single(x, y, z, vx=0.0, vy=0.0, vz=0.0):
    return SoftBody("d1", [Particle(0, Vec3(x, y, z), Vec3(vx, vy, vz))], [], [])


BOX = BoxWorld(Vec3(0.0, 0.0, 0.0), Vec3(10.0, 10.0, 10.0))


class TestPenaltyResolver:
    def test_floor_penetration(self):
        body = single(5.0, -0.1, 5.0, vy=-2.0)
        contacts = resolve_box_penalty(body, BOX, penalty_k=1000.0, restitution=0.5)
        p = body.particles[0]
        assert p.position.y == 0.0
        assert p.velocity.y == 1.0
        assert p.force_by_source["collision"] == Vec3(0.0, pytest.approx(100.0), 0.0)
        assert len(contacts) == 1
        assert contacts[0].speed_before == 2.0 and contacts[0].speed_after == 1.0

    def test_interior_untouched(self):
        body = single(5.0, 5.0, 5.0, vx=3.0)
        contacts = resolve_box_penalty(body, BOX, 1000.0, 0.5)
        p = body.particles[0]
        assert contacts == []
        assert p.position == Vec3(5.0, 5.0, 5.0)
        assert p.velocity == Vec3(3.0, 0.0, 0.0)
        assert p.force_by_source["collision"] == Vec3(0.0, 0.0, 0.0)

    def test_corner_corrects_both_axes(self):
        body = single(-0.2, -0.3, 5.0, vx=-1.0, vy=-2.0)
        resolve_box_penalty(body, BOX, 100.0, 0.5)
        p = body.particles[0]
        assert p.position == Vec3(0.0, 0.0, 5.0)
        assert p.velocity == Vec3(0.5, 1.0, 0.0)
        f = p.force_by_source["collision"]
        assert f.x == pytest.approx(100.0 * 0.2)
        assert f.y == pytest.approx(100.0 * 0.3)

    def test_upper_walls(self):
        body = single(10.4, 5.0, 5.0, vx=2.0)
        resolve_box_penalty(body, BOX, 10.0, 1.0)
        p = body.particles[0]
        assert p.position.x == 10.0
        assert p.velocity.x == -2.0
        assert p.force_by_source["collision"].x == pytest.approx(-4.0)

    def test_containment_random_states(self):
        rng = random.Random(5)
        parts = [Particle(i, Vec3(rng.uniform(-5, 15), rng.uniform(-5, 15), rng.uniform(-5, 15)),
                          Vec3(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)))
                 for i in range(50)]
        body = SoftBody("d3", parts, [], [])
        resolve_box_penalty(body, BOX, 500.0, 0.3)
        for p in body.particles:
            assert BOX.contains(p.position)

    def test_wall_speed_never_increases(self):
        rng = random.Random(6)
        for _ in range(100):
            v = rng.uniform(-8, 8)
            body = single(5.0, -rng.uniform(0.0, 1.0) - 1e-6, 5.0, vy=v)
            contacts = resolve_box_penalty(body, BOX, 100.0, rng.uniform(0.0, 1.0))
            for c in contacts:
                assert c.speed_after <= c.speed_before

    def test_half_step_buffer_reflected_too(self):
        body = single(5.0, -0.1, 5.0, vy=-2.0)
        body.half_step_velocities = [Vec3(0.0, -3.0, 0.0)]
        resolve_box_penalty(body, BOX, 0.0, 0.5)
        assert body.half_step_velocities[0].y == 1.5

    def test_zero_penalty_records_no_force(self):
        body = single(5.0, -0.1, 5.0, vy=-2.0)
        resolve_box_penalty(body, BOX, 0.0, 0.3)
        assert body.particles[0].force_by_source["collision"] == Vec3(0.0, 0.0, 0.0)
        assert body.particles[0].position.y == 0.0


class TestWorldAndRegistry:
    def test_box_needs_positive_extent(self):
        with pytest.raises(SoftbodyError):
            BoxWorld(Vec3(0, 0, 0), Vec3(1, 0, 1))

    def test_registry_lookup(self):
        assert select_detector("penalty") is resolve_box_penalty

    def test_default_is_penalty(self):
        assert select_detector() is resolve_box_penalty
        assert "penalty" in DETECTORS

    def test_unknown_rejected(self):
        with pytest.raises(SoftbodyError) as e:
            select_detector("bvh")
        assert e.value.code == "unknown-detector"
