"""Jellyfish assembly: 2D bell with drag-powered swimming and pressure
breathing, kinematic tentacle chains, and the revolved 3D bell.

The 2D bell is a two-layer loop whose silhouette blends a circle's upper
half with a flattened lower chord (dome up, rim down).  The swim controller
pulls the frontmost particle toward an anchor ahead of it along the body
heading during the duty fraction of each period, and modulates the gas
constant sinusoidally for the breathing.  Tentacles are kinematic
decorations: they read the bell but push nothing back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import SoftbodyError
from .geometry import BellSpec, _assemble_two_layer_loop, build_bell_3d
from .model import Drag, SimParams, SoftBody, Vec3

BELL_OUTER_RADIUS = 1.0
BELL_INNER_RADIUS = 0.7
# Vertical squash applied to the silhouette's lower half.
BELL_FLATTEN = 0.35

DEFAULT_TENTACLE_COUNT = 3


@dataclass
class SwimController:
    """Periodic frontal-drag stroke plus sinusoidal pressure breathing."""

    period: float = 2.0
    duty: float = 0.4
    anchor_offset: float = 0.5
    breath_amplitude: float = 0.3
    base_gas: float = 5.0
    target: int = 0
    enabled: bool = True
    body: int = 0
    drag_index: int = 0

    def __post_init__(self):
        if self.period <= 0:
            raise SoftbodyError("invalid-spec", "swim period must be > 0")
        if not (0.0 < self.duty < 1.0):
            raise SoftbodyError("invalid-spec", "duty must be strictly inside (0, 1)")
        if self.anchor_offset <= 0:
            raise SoftbodyError("invalid-spec", "anchor_offset must be > 0")
        if not (0.0 <= self.breath_amplitude < 1.0):
            raise SoftbodyError("invalid-spec", "breath_amplitude must be in [0, 1)")


@dataclass
class TentacleChain:
    """Fixed-length kinematic linkage hanging from one bell rim particle."""

    root: int
    joint_count: int = 5
    segment_length: float = 0.25
    angles: list = field(default_factory=list)
    phase: float = 0.0
    amplitude: float = 0.3
    phase_lag: float = 0.6
    period: float = 2.0
    body: int = 0
    root_position: Vec3 = field(default_factory=Vec3)
    joints: list = field(default_factory=list)

    def __post_init__(self):
        if self.joint_count < 1:
            raise SoftbodyError("invalid-spec", "tentacle needs >= 1 joint")
        if self.segment_length <= 0:
            raise SoftbodyError("invalid-spec", "segment_length must be > 0")
        if not self.angles:
            self.angles = [0.0] * self.joint_count


def _silhouette(radius: float, angle: float) -> Vec3:
    y = math.sin(angle)
    if y < 0.0:
        y *= BELL_FLATTEN
    return Vec3(radius * math.cos(angle), radius * y, 0.0)


def build_jellyfish_2d(params: SimParams) -> tuple:
    """2D bell body, its swim controller, and tentacle chains.

    The body is built unpressurized (rest construction); the controller
    carries the positive base gas and applies it from its first update, so a
    disabled controller leaves the body in exact equilibrium.
    """
    n = params.geometry.particles_per_layer_2d
    outer = [_silhouette(BELL_OUTER_RADIUS, 2.0 * math.pi * i / n) for i in range(n)]
    inner = [_silhouette(BELL_INNER_RADIUS, 2.0 * math.pi * i / n) for i in range(n)]
    body = _assemble_two_layer_loop(outer, inner, params)
    body.heading = Vec3(1.0, 0.0, 0.0)

    front = max(body.layers.outer,
                key=lambda i: body.particles[i].position.dot(body.heading))
    controller = SwimController(
        target=front,
        base_gas=params.gas_constant if params.gas_constant > 0 else 5.0,
    )

    by_height = sorted(body.layers.outer,
                       key=lambda i: (body.particles[i].position.y, i))
    chains = []
    for c, root in enumerate(by_height[:DEFAULT_TENTACLE_COUNT]):
        chains.append(TentacleChain(
            root=root,
            segment_length=0.25,
            phase=0.4 * c,
            period=controller.period,
            root_position=body.particles[root].position.copy(),
        ))
    return body, controller, chains


def build_jellyfish_3d(params: SimParams) -> tuple:
    """Single-layer revolved bell with the swim controller on the welded
    apex; tentacles default off."""
    spec = BellSpec(profile_samples=params.geometry.bell_profile_points,
                    slices=params.geometry.bell_slices)
    body = build_bell_3d(spec, params)
    body.heading = Vec3(0.0, 1.0, 0.0)  # apex-first
    controller = SwimController(
        target=0,
        base_gas=params.gas_constant if params.gas_constant > 0 else 5.0,
    )
    return body, controller, []


def swim_update(controller: SwimController, t: float, body: SoftBody, drag: Drag) -> Drag:
    """Advance the stroke/breathing state to time t.

    The drag is active during the first ``duty`` fraction of each period,
    anchored ahead of the target particle along the heading; the body's gas
    constant follows ``base_gas * (1 + amplitude * sin(2 pi t / period))``.
    """
    if not controller.enabled:
        drag.active = False
        return drag
    phase = (t % controller.period) / controller.period
    drag.target = controller.target
    drag.active = phase < controller.duty
    if drag.active:
        pos = body.particles[controller.target].position
        h = body.heading
        off = controller.anchor_offset
        drag.anchor = Vec3(pos.x + off * h.x, pos.y + off * h.y, pos.z + off * h.z)
    body.gas_constant = controller.base_gas * (
        1.0 + controller.breath_amplitude * math.sin(2.0 * math.pi * t / controller.period))
    return drag


def update_tentacle_roots(body: SoftBody, chains) -> None:
    """Refresh each chain's root position from its bell particle."""
    for chain in chains:
        chain.root_position = body.particles[chain.root].position.copy()


def animate_tentacles(chains, t: float):
    """Kinematic joint sweep: joint j swings by
    ``amplitude * sin(2 pi t / period + j * phase_lag + chain.phase)`` and
    forward kinematics from the root places the joints; segment lengths are
    preserved exactly.  With zero amplitude a chain hangs straight down."""
    for chain in chains:
        base = 2.0 * math.pi * t / chain.period + chain.phase
        chain.angles = [
            chain.amplitude * math.sin(base + j * chain.phase_lag)
            for j in range(chain.joint_count)
        ]
        joints = []
        x = chain.root_position.x
        y = chain.root_position.y
        z = chain.root_position.z
        heading_angle = -0.5 * math.pi
        for a in chain.angles:
            heading_angle += a
            x += chain.segment_length * math.cos(heading_angle)
            y += chain.segment_length * math.sin(heading_angle)
            joints.append(Vec3(x, y, z))
        chain.joints = joints
    return chains
