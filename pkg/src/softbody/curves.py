"""Cubic Bezier paths and the attachment-point driver.

A path is a run of cubic segments over a shared control point list:
[P0..P3], [P3..P6], ... — each new segment consumes three new points, and a
segment only exists once all four of its points do.  Traversal is uniform in
the parameter (a speed knob, not arc length).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .errors import SoftbodyError
from .model import Drag, SoftBody, Vec3

log = logging.getLogger(__name__)


@dataclass
class BezierPath:
    control_points: list = field(default_factory=list)

    def segment_count(self) -> int:
        return max(0, (len(self.control_points) - 1) // 3)

    def segment(self, k: int) -> tuple:
        i = 3 * k
        cp = self.control_points
        return cp[i], cp[i + 1], cp[i + 2], cp[i + 3]


@dataclass
class CurveDrive:
    """Tows a body's center particle along a path over ``duration`` seconds,
    holding at the curve end afterwards."""

    path: BezierPath
    duration: float = 5.0
    ks: float = 100.0
    kd: float = 10.0
    body: int = 0
    drag_index: int = 0

    def __post_init__(self):
        if self.duration <= 0:
            raise SoftbodyError("invalid-spec", "curve drive duration must be > 0")


def eval_cubic(p0: Vec3, p1: Vec3, p2: Vec3, p3: Vec3, u: float) -> Vec3:
    """Bernstein-form evaluation of one cubic segment.

    Out-of-range u is clamped (live scrubbing must not abort) with a logged
    diagnostic.
    """
    if u < 0.0 or u > 1.0:
        log.debug("bezier parameter %s outside [0,1]; clamping", u)
        u = min(1.0, max(0.0, u))
    w = 1.0 - u
    a = w * w * w
    b = 3.0 * w * w * u
    c = 3.0 * w * u * u
    d = u * u * u
    return Vec3(
        a * p0.x + b * p1.x + c * p2.x + d * p3.x,
        a * p0.y + b * p1.y + c * p2.y + d * p3.y,
        a * p0.z + b * p1.z + c * p2.z + d * p3.z,
    )


def path_point(path: BezierPath, s: float) -> Vec3:
    """Point at global parameter s in [0,1], split uniformly across segments.

    Continuous across joints because adjacent segments share an endpoint.
    """
    k = path.segment_count()
    if k == 0:
        raise SoftbodyError("path-too-short", "path has no complete segment (needs 4 points)")
    if s < 0.0 or s > 1.0:
        log.debug("path parameter %s outside [0,1]; clamping", s)
        s = min(1.0, max(0.0, s))
    scaled = s * k
    idx = min(int(math.floor(scaled)), k - 1)
    u = scaled - idx
    return eval_cubic(*path.segment(idx), u)


def drive(body: SoftBody, curve_drive: CurveDrive, drag: Drag, t: float) -> Drag:
    """Anchor the body's center-particle drag on the curve at time t."""
    if body.layers.center is None:
        raise SoftbodyError("no-center-particle", "curve drive needs a center particle")
    s = t / curve_drive.duration
    anchor = path_point(curve_drive.path, min(1.0, max(0.0, s)))
    drag.target = body.layers.center
    drag.anchor = anchor
    drag.ks = curve_drive.ks
    drag.kd = curve_drive.kd
    drag.active = True
    return drag
