"""Layered spring-mass-pressure softbody simulation engine.

Deformable bodies are concentric mass-spring surfaces enclosing compressible
gas, advanced by interchangeable explicit integrators inside a box world,
with every simulation knob adjustable between steps.
"""

from .collision import BoxWorld, resolve_box_penalty, select_detector
from .curves import BezierPath, CurveDrive, drive, eval_cubic, path_point
from .errors import SoftbodyError
from .forces import (ForceReport, accumulate_all, accumulate_drag,
                     accumulate_gravity, accumulate_pressure, force_report,
                     spring_force)
from .geometry import (BellSpec, RingSpec, SphereSpec, add_center_particle,
                       build_bell_3d, build_chain_1d, build_ring_2d,
                       build_sphere_3d, translate)
from .integrators import (INTEGRATORS, derivatives, select_integrator,
                          step_euler, step_feynman, step_midpoint, step_rk4)
from .jellyfish import (SwimController, TentacleChain, animate_tentacles,
                        build_jellyfish_2d, build_jellyfish_3d, swim_update)
from .model import (Drag, Face, Layers, Particle, SimParams, SoftBody, Spring,
                    SpringCoeffs, Vec3, enclosed_measure, nearest_particle,
                    reset_forces)
from .session import (DumpWriter, Session, Stats, dump_frame, restore,
                      restore_json, run, snapshot, snapshot_json, step)

__version__ = "0.1.0"
