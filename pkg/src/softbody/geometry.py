"""Procedural body builders: 1D chain, 2D layered ring, 3D subdivided
sphere, 3D revolved bell.

Every builder produces a body whose spring rest lengths equal the as-built
distances, so springs alone exert no force on the fresh body.  Builders set
``gas_constant`` to zero; scenarios and controllers pressurize bodies
afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .curves import BezierPath, path_point
from .errors import SoftbodyError
from .model import (Face, Layers, Particle, SimParams, SoftBody, Spring, Vec3)

# Profile points closer to the revolution axis than this are welded into a
# single on-axis particle instead of a degenerate ring.
AXIS_WELD_EPS = 1e-9


@dataclass
class RingSpec:
    """Two concentric particle rings, angularly aligned."""

    particles_per_layer: int = 16
    outer_radius: float = 1.0
    inner_radius: float = 0.7
    center: Vec3 = field(default_factory=Vec3)
    with_center_particle: bool = False

    def validate(self) -> None:
        if self.particles_per_layer < 3:
            raise SoftbodyError("invalid-spec", "ring needs >= 3 particles per layer")
        if not (self.outer_radius > self.inner_radius > 0):
            raise SoftbodyError("invalid-spec", "need outer_radius > inner_radius > 0")


@dataclass
class SphereSpec:
    """Octahedron-based subdivided sphere, optionally two-layer."""

    iterations: int = 2
    outer_radius: float = 1.0
    inner_radius: float = 0.7
    center: Vec3 = field(default_factory=Vec3)
    two_layer: bool = True

    def validate(self) -> None:
        if self.iterations < 0:
            raise SoftbodyError("invalid-spec", "iterations must be >= 0")
        if not (self.outer_radius > self.inner_radius > 0):
            raise SoftbodyError("invalid-spec", "need outer_radius > inner_radius > 0")


@dataclass
class BellSpec:
    """A cubic Bezier profile revolved around the vertical axis through the
    apex.  Profile points are (radial distance, height offset) pairs in their
    x and y components; a point with radial distance ~0 welds to the axis."""

    profile_control_points: list = field(default_factory=lambda: [
        Vec3(0.0, 0.0, 0.0),
        Vec3(0.55, -0.05, 0.0),
        Vec3(0.95, -0.35, 0.0),
        Vec3(0.75, -0.85, 0.0),
    ])
    profile_samples: int = 12
    slices: int = 7
    apex: Vec3 = field(default_factory=Vec3)

    def validate(self) -> None:
        if self.profile_samples < 3:
            raise SoftbodyError("invalid-spec", "profile needs >= 3 samples")
        if self.slices < 3:
            raise SoftbodyError("invalid-spec", "bell needs >= 3 slices")
        if len(self.profile_control_points) < 4:
            raise SoftbodyError("invalid-spec", "profile needs >= 4 control points")


def _dist(a: Vec3, b: Vec3) -> float:
    return (a - b).norm()


def _add_spring(springs: list, params: SimParams, particles: list,
                p1: int, p2: int, kind: str) -> None:
    springs.append(Spring(
        id=len(springs), p1=p1, p2=p2,
        rest_length=_dist(particles[p1].position, particles[p2].position),
        ks=params.ks.get(kind), kd=params.kd.get(kind), kind=kind,
    ))


def translate(body: SoftBody, offset: Vec3) -> SoftBody:
    """Shift every particle position by ``offset`` (placement helper)."""
    for p in body.particles:
        p.position.x += offset.x
        p.position.y += offset.y
        p.position.z += offset.z
    return body


def build_chain_1d(n: int, spacing: float, params: SimParams) -> SoftBody:
    """A straight chain of ``n`` particles along +x with n-1 structural
    springs; no faces, no pressure."""
    if n < 2:
        raise SoftbodyError("invalid-spec", "chain needs >= 2 particles")
    if spacing <= 0:
        raise SoftbodyError("invalid-spec", "spacing must be > 0")
    particles = [Particle(i, Vec3(i * spacing, 0.0, 0.0), mass=params.default_mass)
                 for i in range(n)]
    springs = []
    for i in range(n - 1):
        _add_spring(springs, params, particles, i, i + 1, "structural")
    return SoftBody("d1", particles, springs, faces=[],
                    layers=Layers(outer=list(range(n))))


def _assemble_two_layer_loop(outer_pts: list, inner_pts: list,
                             params: SimParams) -> SoftBody:
    """Shared 2D assembly: two aligned closed loops of N points each.

    Springs: 2N structural along each loop, N radial between aligned pairs,
    2N shear between outer_i and inner_(i +/- 1).  Faces: the N outer edges,
    wound in the order the outer points are given (callers supply CCW).
    """
    n = len(outer_pts)
    particles = []
    for i, pt in enumerate(outer_pts):
        particles.append(Particle(i, pt.copy(), mass=params.default_mass))
    for i, pt in enumerate(inner_pts):
        particles.append(Particle(n + i, pt.copy(), mass=params.default_mass))
    springs = []
    for i in range(n):
        _add_spring(springs, params, particles, i, (i + 1) % n, "structural")
    for i in range(n):
        _add_spring(springs, params, particles, n + i, n + (i + 1) % n, "structural")
    for i in range(n):
        _add_spring(springs, params, particles, i, n + i, "radial")
    for i in range(n):
        _add_spring(springs, params, particles, i, n + (i + 1) % n, "shear")
        _add_spring(springs, params, particles, i, n + (i - 1) % n, "shear")
    faces = [Face((i, (i + 1) % n)) for i in range(n)]
    return SoftBody("d2", particles, springs, faces,
                    layers=Layers(outer=list(range(n)), inner=list(range(n, 2 * n))))


def build_ring_2d(spec: RingSpec, params: SimParams) -> SoftBody:
    """Two-layer circular ring in the z = 0 plane, CCW outer loop."""
    spec.validate()
    n = spec.particles_per_layer
    outer = []
    inner = []
    for i in range(n):
        angle = 2.0 * math.pi * i / n
        c, s = math.cos(angle), math.sin(angle)
        outer.append(Vec3(spec.center.x + spec.outer_radius * c,
                          spec.center.y + spec.outer_radius * s, 0.0))
        inner.append(Vec3(spec.center.x + spec.inner_radius * c,
                          spec.center.y + spec.inner_radius * s, 0.0))
    body = _assemble_two_layer_loop(outer, inner, params)
    if spec.with_center_particle:
        add_center_particle(body, params)
    return body


def add_center_particle(body: SoftBody, params: SimParams) -> SoftBody:
    """Append the third layer: a single particle at the inner layer's
    centroid, tied to every inner particle by center-kind springs."""
    if body.layers.center is not None:
        raise SoftbodyError("center-exists", "body already has a center particle")
    if not body.layers.inner:
        raise SoftbodyError("invalid-body", "center particle needs an inner layer")
    c = Vec3()
    for i in body.layers.inner:
        pos = body.particles[i].position
        c.x += pos.x
        c.y += pos.y
        c.z += pos.z
    k = len(body.layers.inner)
    c.x /= k
    c.y /= k
    c.z /= k
    idx = len(body.particles)
    body.particles.append(Particle(idx, c, mass=params.default_mass))
    for i in body.layers.inner:
        _add_spring(body.springs, params, body.particles, idx, i, "center")
    body.layers.center = idx
    return body


def _octahedron():
    vertices = [Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)]
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
             (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return vertices, faces


def _subdivide(vertices: list, faces: list, radius: float):
    """One 4-to-1 triangle split with new vertices pushed onto the sphere."""
    midpoint = {}

    def mid(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        found = midpoint.get(key)
        if found is not None:
            return found
        va, vb = vertices[a], vertices[b]
        m = Vec3(0.5 * (va.x + vb.x), 0.5 * (va.y + vb.y), 0.5 * (va.z + vb.z))
        scale = radius / m.norm()
        m.x *= scale
        m.y *= scale
        m.z *= scale
        vertices.append(m)
        midpoint[key] = len(vertices) - 1
        return midpoint[key]

    out = []
    for a, b, c in faces:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
    return vertices, out


def _edges_of(faces: list) -> list:
    seen = {}
    for a, b, c in faces:
        for e in ((a, b), (b, c), (c, a)):
            key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
            if key not in seen:
                seen[key] = None
    return list(seen)


def build_sphere_3d(spec: SphereSpec, params: SimParams) -> SoftBody:
    """Subdivided-octahedron sphere with F = 8*4^k faces; the two-layer
    variant duplicates the mesh at the inner radius and ties the layers with
    radial and shear springs."""
    spec.validate()
    if spec.iterations > params.geometry.subdivision_cap:
        raise SoftbodyError(
            "lod-cap",
            f"{spec.iterations} subdivision iterations exceed the cap "
            f"({params.geometry.subdivision_cap})")
    vertices, faces = _octahedron()
    for v in vertices:
        v.x *= spec.outer_radius
        v.y *= spec.outer_radius
        v.z *= spec.outer_radius
    for _ in range(spec.iterations):
        vertices, faces = _subdivide(vertices, faces, spec.outer_radius)
    edges = _edges_of(faces)

    nv = len(vertices)
    particles = []
    for i, v in enumerate(vertices):
        particles.append(Particle(i, spec.center + v, mass=params.default_mass))
    springs = []
    body_faces = [Face(f) for f in faces]
    layers = Layers(outer=list(range(nv)))

    if spec.two_layer:
        ratio = spec.inner_radius / spec.outer_radius
        for i, v in enumerate(vertices):
            particles.append(Particle(nv + i, spec.center + v * ratio,
                                      mass=params.default_mass))
        layers.inner = list(range(nv, 2 * nv))
    for a, b in edges:
        _add_spring(springs, params, particles, a, b, "structural")
    if spec.two_layer:
        for a, b in edges:
            _add_spring(springs, params, particles, nv + a, nv + b, "structural")
        for i in range(nv):
            _add_spring(springs, params, particles, i, nv + i, "radial")
        for a, b in edges:
            _add_spring(springs, params, particles, a, nv + b, "shear")
            _add_spring(springs, params, particles, b, nv + a, "shear")

    return SoftBody("d3", particles, springs, body_faces, layers)


def build_bell_3d(spec: BellSpec, params: SimParams) -> SoftBody:
    """Revolved-profile bell: single layer, closed by a rim fan so the
    enclosed volume (and therefore pressure) is well defined.

    Structural springs run along rings and meridians, shear springs across
    both diagonals of every quad between consecutive rings.
    """
    spec.validate()
    path = BezierPath(spec.profile_control_points)
    samples = []
    for i in range(spec.profile_samples):
        u = i / (spec.profile_samples - 1)
        pt = path_point(path, u)
        if pt.x < -AXIS_WELD_EPS:
            raise SoftbodyError("invalid-spec", "profile radius went negative")
        samples.append((max(pt.x, 0.0), pt.y))

    n_slices = spec.slices
    particles = []
    rows = []  # per sample: single index for a welded point, else a list of ring indices
    for r, h in samples:
        if r < AXIS_WELD_EPS:
            idx = len(particles)
            particles.append(Particle(idx, Vec3(spec.apex.x, spec.apex.y + h, spec.apex.z),
                                      mass=params.default_mass))
            rows.append(idx)
        else:
            ring = []
            for j in range(n_slices):
                angle = 2.0 * math.pi * j / n_slices
                idx = len(particles)
                particles.append(Particle(idx, Vec3(
                    spec.apex.x + r * math.cos(angle),
                    spec.apex.y + h,
                    spec.apex.z + r * math.sin(angle)), mass=params.default_mass))
                ring.append(idx)
            rows.append(ring)
    for i, row in enumerate(rows):
        if isinstance(row, int) and 0 < i < len(rows) - 1:
            raise SoftbodyError("invalid-spec", "profile touches the axis mid-way")

    springs = []
    faces = []
    for upper, lower in zip(rows, rows[1:]):
        if isinstance(upper, int) and isinstance(lower, int):
            _add_spring(springs, params, particles, upper, lower, "structural")
            continue
        if isinstance(upper, int):
            for j in range(n_slices):
                jn = (j + 1) % n_slices
                _add_spring(springs, params, particles, upper, lower[j], "structural")
                faces.append(Face((upper, lower[jn], lower[j])))
            continue
        if isinstance(lower, int):
            for j in range(n_slices):
                jn = (j + 1) % n_slices
                _add_spring(springs, params, particles, upper[j], lower, "structural")
                faces.append(Face((upper[j], upper[jn], lower)))
            continue
        for j in range(n_slices):
            jn = (j + 1) % n_slices
            _add_spring(springs, params, particles, upper[j], lower[j], "structural")
            _add_spring(springs, params, particles, upper[j], lower[jn], "shear")
            _add_spring(springs, params, particles, upper[jn], lower[j], "shear")
            faces.append(Face((upper[j], lower[jn], lower[j])))
            faces.append(Face((upper[j], upper[jn], lower[jn])))
    for row in rows:
        if isinstance(row, list):
            for j in range(n_slices):
                _add_spring(springs, params, particles, row[j], row[(j + 1) % n_slices],
                            "structural")
    rim = rows[-1]
    if isinstance(rim, list):
        # Close the open rim with a fan over the rim particles themselves so
        # the surface bounds a volume; no virtual centroid particle.
        for j in range(1, n_slices - 1):
            faces.append(Face((rim[0], rim[j], rim[j + 1])))

    return SoftBody("d3", particles, springs, faces,
                    layers=Layers(outer=list(range(len(particles)))))
