"""Worlds framework and collision detectors.

The default world is an axis-aligned box; the default (and currently only)
detector is the penalty method, which records a force proportional to the
penetration depth, clamps the particle back to the boundary, and reflects
the wall-normal velocity component scaled by the restitution.  There is no
contact surface: each axis is handled independently, so corner penetrations
are corrected on both axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SoftbodyError
from .model import SoftBody, Vec3


@dataclass
class BoxWorld:
    """Axis-aligned box bounds; bodies live inside."""

    min: Vec3 = field(default_factory=lambda: Vec3(-5.0, 0.0, -5.0))
    max: Vec3 = field(default_factory=lambda: Vec3(5.0, 10.0, 5.0))

    def __post_init__(self):
        if not (self.min.x < self.max.x and self.min.y < self.max.y and self.min.z < self.max.z):
            raise SoftbodyError("invalid-world", "box must have positive extent on every axis")

    def contains(self, p: Vec3) -> bool:
        return (self.min.x <= p.x <= self.max.x
                and self.min.y <= p.y <= self.max.y
                and self.min.z <= p.z <= self.max.z)


@dataclass
class Contact:
    """One particle/wall correction event, for dissipation diagnostics."""

    particle: int
    axis: str
    depth: float
    speed_before: float
    speed_after: float


def resolve_box_penalty(body: SoftBody, world: BoxWorld,
                        penalty_k: float, restitution: float) -> list:
    """Correct every particle against the box walls.

    Per particle and axis: record a penalty force ``penalty_k * depth`` along
    the inward normal in the collision accumulator, clamp the position onto
    the wall, and reflect the axis velocity by ``-restitution``.  Afterwards
    no particle lies outside the box.  Returns the list of contacts made.
    """
    contacts = []
    lo = world.min
    hi = world.max
    half = body.half_step_velocities
    for p in body.particles:
        pos = p.position
        vel = p.velocity
        force = p.force_by_source["collision"]
        for axis in ("x", "y", "z"):
            c = getattr(pos, axis)
            lo_a = getattr(lo, axis)
            hi_a = getattr(hi, axis)
            if c < lo_a:
                depth = lo_a - c
                normal = 1.0
                wall = lo_a
            elif c > hi_a:
                depth = c - hi_a
                normal = -1.0
                wall = hi_a
            else:
                continue
            setattr(force, axis, getattr(force, axis) + penalty_k * depth * normal)
            setattr(pos, axis, wall)
            v_before = getattr(vel, axis)
            v_after = -restitution * v_before
            setattr(vel, axis, v_after)
            if half is not None:
                # Staggered integrators keep their own velocity copy; reflect
                # it as well or wall contact pumps energy into the buffer.
                vh = half[p.id]
                setattr(vh, axis, -restitution * getattr(vh, axis))
            contacts.append(Contact(p.id, axis, depth, abs(v_before), abs(v_after)))
    return contacts


DETECTORS = {"penalty": resolve_box_penalty}

DEFAULT_DETECTOR = "penalty"


def select_detector(detector_id: str | None = None):
    """Look up a collision resolver; ``None`` selects the default."""
    if detector_id is None:
        detector_id = DEFAULT_DETECTOR
    try:
        return DETECTORS[detector_id]
    except KeyError:
        raise SoftbodyError(
            "unknown-detector",
            f"unknown detector {detector_id!r}; known: {', '.join(DETECTORS)}",
        ) from None
