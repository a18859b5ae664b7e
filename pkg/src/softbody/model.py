"""Core simulation domain types: vectors, particles, springs, faces, bodies.

Everything is SI: meters, kilograms, seconds, newtons.  2D bodies live in the
z = 0 plane of the same 3D space as 3D bodies, so there is a single code path
for vectors and forces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import SoftbodyError

# The five force channels every particle tracks separately.  Dumps and
# diagnostics need the per-source split, not just the net.
FORCE_SOURCES = ("gravity", "spring", "pressure", "drag", "collision")

SPRING_KINDS = ("structural", "radial", "shear", "drag", "center")

DIMENSIONALITIES = ("d1", "d2", "d3")

INTEGRATOR_IDS = ("euler", "midpoint", "feynman", "rk4")


class Vec3:
    """A 3-component vector. Arithmetic returns new vectors; the force
    accumulation loops mutate components in place for speed."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        self.x = x
        self.y = y
        self.z = z

    def __add__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __eq__(self, o) -> bool:
        return isinstance(o, Vec3) and self.x == o.x and self.y == o.y and self.z == o.z

    def __repr__(self) -> str:
        return f"Vec3({self.x!r}, {self.y!r}, {self.z!r})"

    def dot(self, o: "Vec3") -> float:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o: "Vec3") -> "Vec3":
        return Vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise SoftbodyError("zero-vector", "cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def copy(self) -> "Vec3":
        return Vec3(self.x, self.y, self.z)

    def set(self, x: float, y: float, z: float) -> None:
        self.x = x
        self.y = y
        self.z = z

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def to_list(self) -> list:
        return [self.x, self.y, self.z]

    @staticmethod
    def from_list(v) -> "Vec3":
        return Vec3(float(v[0]), float(v[1]), float(v[2]))


def _zero_forces() -> dict:
    return {src: Vec3() for src in FORCE_SOURCES}


class Particle:
    """A point mass with per-source force accumulators.

    ``pinned`` particles accumulate forces but integrators never move them,
    which is how bodies get anchored to hard surfaces.
    """

    __slots__ = ("id", "position", "velocity", "mass", "force_by_source", "pinned")

    def __init__(self, id: int, position: Vec3, velocity: Vec3 | None = None,
                 mass: float = 1.0, pinned: bool = False):
        if mass <= 0:
            raise SoftbodyError("invalid-particle", f"particle {id}: mass must be > 0, got {mass}")
        self.id = id
        self.position = position
        self.velocity = velocity if velocity is not None else Vec3()
        self.mass = mass
        self.force_by_source = _zero_forces()
        self.pinned = pinned

    def total_force(self) -> Vec3:
        f = Vec3()
        for v in self.force_by_source.values():
            f.x += v.x
            f.y += v.y
            f.z += v.z
        return f


class Spring:
    """A damped Hooke link between two particles of one body."""

    __slots__ = ("id", "p1", "p2", "rest_length", "ks", "kd", "kind")

    def __init__(self, id: int, p1: int, p2: int, rest_length: float,
                 ks: float, kd: float, kind: str):
        if p1 == p2:
            raise SoftbodyError("invalid-spring", f"spring {id}: endpoints must differ")
        if rest_length < 0 or ks < 0 or kd < 0:
            raise SoftbodyError("invalid-spring", f"spring {id}: rest/ks/kd must be >= 0")
        if kind not in SPRING_KINDS:
            raise SoftbodyError("invalid-spring", f"spring {id}: unknown kind {kind!r}")
        self.id = id
        self.p1 = p1
        self.p2 = p2
        self.rest_length = rest_length
        self.ks = ks
        self.kd = kd
        self.kind = kind


class Face:
    """An ordered particle tuple carrying pressure: a 2-index edge for 2D
    bodies, a 3-index triangle for 3D, wound counter-clockwise seen from
    outside the body."""

    __slots__ = ("indices",)

    def __init__(self, indices):
        indices = tuple(indices)
        if len(indices) not in (2, 3):
            raise SoftbodyError("invalid-face", f"face must have 2 or 3 indices, got {len(indices)}")
        if len(set(indices)) != len(indices):
            raise SoftbodyError("invalid-face", f"face indices must be distinct: {indices}")
        self.indices = indices

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


@dataclass
class Layers:
    """Index bookkeeping for the layered body structure: the outer surface,
    the optional inner surface, and the optional single center particle."""

    outer: list = field(default_factory=list)
    inner: list = field(default_factory=list)
    center: int | None = None


class SoftBody:
    """A layered particle/spring/face aggregate.

    Index integrity is checked at construction; code that mutates the body
    afterwards is expected to keep it valid.
    """

    def __init__(self, dimensionality: str, particles: list, springs: list,
                 faces: list, layers: Layers | None = None,
                 gas_constant: float = 0.0, heading: Vec3 | None = None):
        if dimensionality not in DIMENSIONALITIES:
            raise SoftbodyError("invalid-body", f"unknown dimensionality {dimensionality!r}")
        if gas_constant < 0:
            raise SoftbodyError("invalid-body", "gas_constant must be >= 0")
        if dimensionality == "d1" and (faces or gas_constant != 0.0):
            raise SoftbodyError("invalid-body", "1D bodies have no faces and no gas pressure")
        self.dimensionality = dimensionality
        self.particles = particles
        self.springs = springs
        self.faces = faces
        self.layers = layers if layers is not None else Layers()
        self.gas_constant = gas_constant
        self.heading = heading if heading is not None else Vec3(1.0, 0.0, 0.0)
        # Staggered half-step velocities; allocated by the leapfrog-style
        # integrator on first use and carried in snapshots.
        self.half_step_velocities: list | None = None
        # Degenerate (zero-length) springs seen in the latest accumulation
        # pass, and wall time spent accumulating during the current step;
        # diagnostics only, never part of snapshots.
        self.degenerate_spring_count = 0
        self.accumulate_seconds = 0.0
        self._validate()

    def _validate(self) -> None:
        n = len(self.particles)
        for i, p in enumerate(self.particles):
            if p.id != i:
                raise SoftbodyError("invalid-body", f"particle {i} has id {p.id}")
        for s in self.springs:
            if not (0 <= s.p1 < n and 0 <= s.p2 < n):
                raise SoftbodyError("invalid-body", f"spring {s.id} references missing particle")
        for f in self.faces:
            for i in f.indices:
                if not (0 <= i < n):
                    raise SoftbodyError("invalid-body", f"face references missing particle {i}")
        for i in self.layers.outer + self.layers.inner:
            if not (0 <= i < n):
                raise SoftbodyError("invalid-body", f"layer references missing particle {i}")
        if self.layers.center is not None and not (0 <= self.layers.center < n):
            raise SoftbodyError("invalid-body", "center index out of range")

    def centroid(self) -> Vec3:
        c = Vec3()
        for p in self.particles:
            c.x += p.position.x
            c.y += p.position.y
            c.z += p.position.z
        n = len(self.particles)
        if n:
            c.x /= n
            c.y /= n
            c.z /= n
        return c


@dataclass
class SpringCoeffs:
    """One coefficient (elasticity or damping) per spring kind."""

    structural: float = 60.0
    radial: float = 60.0
    shear: float = 40.0
    drag: float = 3.0
    center: float = 60.0

    def get(self, kind: str) -> float:
        return getattr(self, kind)

    def validate(self) -> None:
        for kind in SPRING_KINDS:
            if getattr(self, kind) < 0:
                raise SoftbodyError("invalid-params", f"coefficient for {kind} must be >= 0")


@dataclass
class GeometryParams:
    """Geometry-density LOD knobs consumed by the procedural builders."""

    particles_per_layer_2d: int = 16
    subdivision_iterations_3d: int = 2
    bell_profile_points: int = 12
    bell_slices: int = 7
    subdivision_cap: int = 4

    def validate(self) -> None:
        if self.particles_per_layer_2d < 3:
            raise SoftbodyError("invalid-params", "particles_per_layer_2d must be >= 3")
        if self.subdivision_iterations_3d < 0:
            raise SoftbodyError("invalid-params", "subdivision_iterations_3d must be >= 0")
        if self.bell_profile_points < 3 or self.bell_slices < 3:
            raise SoftbodyError("invalid-params", "bell profile points and slices must be >= 3")


@dataclass
class CollisionParams:
    penalty_k: float = 1000.0
    restitution: float = 0.3

    def validate(self) -> None:
        if self.penalty_k < 0:
            raise SoftbodyError("invalid-params", "penalty_k must be >= 0")
        if not (0.0 <= self.restitution <= 1.0):
            raise SoftbodyError("invalid-params", "restitution must be in [0, 1]")


@dataclass
class SimParams:
    """The runtime LOD state.

    Every field may be mutated between steps and takes effect on the next
    step; nothing is cached across steps by the force or integration code.
    """

    integrator: str = "euler"
    dt: float = 0.005
    ks: SpringCoeffs = field(default_factory=SpringCoeffs)
    kd: SpringCoeffs = field(default_factory=lambda: SpringCoeffs(
        structural=1.5, radial=1.5, shear=1.0, drag=0.8, center=1.5))
    gravity: Vec3 = field(default_factory=lambda: Vec3(0.0, -9.81, 0.0))
    default_mass: float = 0.2
    gas_constant: float = 5.0
    geometry: GeometryParams = field(default_factory=GeometryParams)
    collision: CollisionParams = field(default_factory=CollisionParams)
    toggles: dict = field(default_factory=lambda: {"d1": True, "d2": True, "d3": True})

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.integrator not in INTEGRATOR_IDS:
            raise SoftbodyError("unknown-integrator", f"unknown integrator {self.integrator!r}")
        if self.dt <= 0:
            raise SoftbodyError("invalid-params", "dt must be > 0")
        if self.default_mass <= 0:
            raise SoftbodyError("invalid-params", "default_mass must be > 0")
        if self.gas_constant < 0:
            raise SoftbodyError("invalid-params", "gas_constant must be >= 0")
        self.ks.validate()
        self.kd.validate()
        self.geometry.validate()
        self.collision.validate()

    # Dotted-name access: the stable namespace the LOD wire protocol and
    # scenario files use to address individual knobs.

    def param_items(self) -> dict:
        items = {
            "integrator": self.integrator,
            "dt": self.dt,
            "default_mass": self.default_mass,
            "gas_constant": self.gas_constant,
            "gravity.x": self.gravity.x,
            "gravity.y": self.gravity.y,
            "gravity.z": self.gravity.z,
        }
        for kind in SPRING_KINDS:
            items[f"ks.{kind}"] = self.ks.get(kind)
            items[f"kd.{kind}"] = self.kd.get(kind)
        for name in ("particles_per_layer_2d", "subdivision_iterations_3d",
                     "bell_profile_points", "bell_slices", "subdivision_cap"):
            items[f"geometry.{name}"] = getattr(self.geometry, name)
        items["collision.penalty_k"] = self.collision.penalty_k
        items["collision.restitution"] = self.collision.restitution
        for d in DIMENSIONALITIES:
            items[f"toggles.{d}"] = self.toggles[d]
        return items

    def get_param(self, name: str):
        items = self.param_items()
        if name not in items:
            raise SoftbodyError("unknown-param", f"unknown parameter {name!r}")
        return items[name]

    def set_param(self, name: str, value) -> None:
        """Set one dotted-name field, validating the result; a rejected value
        leaves the params untouched."""
        if name not in self.param_items():
            raise SoftbodyError("unknown-param", f"unknown parameter {name!r}")
        old = self.get_param(name)
        try:
            self._assign(name, value)
            self.validate()
        except SoftbodyError:
            self._assign(name, old)
            raise
        except (TypeError, ValueError) as e:
            self._assign(name, old)
            raise SoftbodyError("invalid-params", f"bad value for {name}: {e}") from e

    def _assign(self, name: str, value) -> None:
        if name == "integrator":
            self.integrator = str(value)
            return
        if name in ("dt", "default_mass", "gas_constant"):
            setattr(self, name, float(value))
            return
        head, _, tail = name.partition(".")
        if head == "gravity":
            setattr(self.gravity, tail, float(value))
        elif head in ("ks", "kd"):
            setattr(getattr(self, head), tail, float(value))
        elif head == "geometry":
            setattr(self.geometry, tail, int(value))
        elif head == "collision":
            setattr(self.collision, tail, float(value))
        elif head == "toggles":
            self.toggles[tail] = bool(value)


@dataclass
class Drag:
    """A spring-like pull between one particle and a moving anchor point.

    Models mouse/haptic pulling as well as the jellyfish's self-propulsion
    stroke.  ``body`` selects the body within a session.
    """

    target: int = 0
    anchor: Vec3 = field(default_factory=Vec3)
    ks: float = 30.0
    kd: float = 2.0
    active: bool = False
    body: int = 0


def reset_forces(body: SoftBody) -> SoftBody:
    """Zero all five force accumulators on every particle; positions and
    velocities are untouched.  Idempotent."""
    for p in body.particles:
        for v in p.force_by_source.values():
            v.x = 0.0
            v.y = 0.0
            v.z = 0.0
    return body


def enclosed_measure(body: SoftBody) -> float:
    """Signed area (2D) or volume (3D) enclosed by the body's face set.

    2D uses the shoelace sum over the outer edge loop; 3D uses the divergence
    theorem over the triangulated surface.  Positive for counter-clockwise
    (outward) winding; reversing the winding flips the sign.
    """
    if body.dimensionality == "d1" or len(body.faces) < 3:
        raise SoftbodyError("degenerate-body", "need a closed boundary of >= 3 faces")
    parts = body.particles
    total = 0.0
    if body.dimensionality == "d2":
        for f in body.faces:
            a = parts[f.indices[0]].position
            b = parts[f.indices[1]].position
            total += a.x * b.y - b.x * a.y
        return 0.5 * total
    for f in body.faces:
        a = parts[f.indices[0]].position
        b = parts[f.indices[1]].position
        c = parts[f.indices[2]].position
        total += a.dot(b.cross(c))
    return total / 6.0


def nearest_particle(body: SoftBody, point: Vec3) -> int:
    """Index of the particle closest to ``point``; ties go to the lowest index."""
    if not body.particles:
        raise SoftbodyError("empty-body", "body has no particles")
    best = 0
    best_d = float("inf")
    for i, p in enumerate(body.particles):
        d = (p.position - point).dot(p.position - point)
        if d < best_d:
            best = i
            best_d = d
    return best
