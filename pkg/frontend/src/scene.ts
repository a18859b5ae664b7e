// Scene state: nothing is queued, the newest frame simply replaces the
// previous one, so a burst of frames costs constant memory and the renderer
// always draws the latest state.

import { Frame, FrameStats, isFrame } from "./protocol.js";

export interface Selection {
    body: number;
    particle: number;
}

export class SceneModel {
    latest: Frame | null = null;
    stats: FrameStats | null = null;
    selection: Selection | null = null;
    framesSeen = 0;
    framesDropped = 0;

    /** Apply one incoming message; malformed or non-frame input is dropped
     *  without disturbing the current scene. Returns true if the scene
     *  advanced. */
    decodeFrame(message: string): boolean {
        let parsed: unknown;
        try {
            parsed = JSON.parse(message);
        } catch {
            this.framesDropped += 1;
            console.warn("dropping malformed frame");
            return false;
        }
        if (!isFrame(parsed)) {
            return false; // replies, hello, future message types
        }
        this.latest = parsed;
        this.stats = parsed.stats ?? null;
        this.framesSeen += 1;
        return true;
    }

    particleCount(): number {
        if (!this.latest) return 0;
        return this.latest.bodies.reduce((n, b) => n + b.particles.length, 0);
    }

    /** Center of the axis-aligned bounding box of every particle, or null
     *  for an empty scene; the orbit camera targets this. */
    boundsCenter(): { x: number; y: number; z: number } | null {
        if (!this.latest) return null;
        let lo = [Infinity, Infinity, Infinity];
        let hi = [-Infinity, -Infinity, -Infinity];
        let any = false;
        for (const body of this.latest.bodies) {
            for (const p of body.particles) {
                any = true;
                for (let k = 0; k < 3; k++) {
                    if (p[k] < lo[k]) lo[k] = p[k];
                    if (p[k] > hi[k]) hi[k] = p[k];
                }
            }
        }
        if (!any) return null;
        return {
            x: (lo[0] + hi[0]) / 2,
            y: (lo[1] + hi[1]) / 2,
            z: (lo[2] + hi[2]) / 2,
        };
    }

    /** Nearest particle to a world-space point over every body; ties go to
     *  the lower body/particle index. */
    nearestParticle(x: number, y: number, z = 0): Selection | null {
        if (!this.latest) return null;
        let best: Selection | null = null;
        let bestD = Infinity;
        for (const body of this.latest.bodies) {
            for (let i = 0; i < body.particles.length; i++) {
                const [px, py, pz] = body.particles[i];
                const d = (px - x) ** 2 + (py - y) ** 2 + (pz - z) ** 2;
                if (d < bestD) {
                    bestD = d;
                    best = { body: body.id, particle: i };
                }
            }
        }
        return best;
    }
}
