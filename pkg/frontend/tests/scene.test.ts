import { describe, expect, it } from "vitest";

import { SceneModel } from "../src/scene.js";
import { Frame } from "../src/protocol.js";

function frame(t: number, particles: number[][] = [[0, 0, 0]]): string {
    const f: Frame = {
        type: "frame",
        t,
        bodies: [{ id: 0, particles, springs: [], tentacles: [] }],
        stats: { steps_per_s: 100, step_ms: 1.0, degenerate_springs: 0 },
    };
    return JSON.stringify(f);
}

describe("decode_frame", () => {
    it("renders the particles of a decoded frame", () => {
        const scene = new SceneModel();
        const ok = scene.decodeFrame(frame(0.1, [[0, 0, 0], [1, 0, 0], [0, 1, 0]]));
        expect(ok).toBe(true);
        expect(scene.particleCount()).toBe(3);
        expect(scene.stats?.steps_per_s).toBe(100);
    });

    it("keeps an empty-bodies frame but shows stats", () => {
        const scene = new SceneModel();
        const text = JSON.stringify({
            type: "frame", t: 0, bodies: [],
            stats: { steps_per_s: 5, step_ms: 2, degenerate_springs: 1 },
        });
        expect(scene.decodeFrame(text)).toBe(true);
        expect(scene.particleCount()).toBe(0);
        expect(scene.stats?.degenerate_springs).toBe(1);
    });

    it("ignores non-frame messages without error", () => {
        const scene = new SceneModel();
        scene.decodeFrame(frame(0.1));
        expect(scene.decodeFrame(JSON.stringify({ type: "hello", proto: 1 }))).toBe(false);
        expect(scene.decodeFrame(JSON.stringify({ ok: true }))).toBe(false);
        expect(scene.latest?.t).toBe(0.1);
    });

    it("drops malformed JSON but keeps the connection state", () => {
        const scene = new SceneModel();
        scene.decodeFrame(frame(0.2));
        expect(scene.decodeFrame("{nope")).toBe(false);
        expect(scene.framesDropped).toBe(1);
        expect(scene.latest?.t).toBe(0.2);
    });
});

describe("latest-frame retention", () => {
    it("a 1000-frame burst leaves exactly the newest frame", () => {
        const scene = new SceneModel();
        for (let i = 0; i < 1000; i++) {
            scene.decodeFrame(frame(i * 0.01, [[i, 0, 0]]));
        }
        expect(scene.framesSeen).toBe(1000);
        expect(scene.latest?.t).toBeCloseTo(9.99);
        expect(scene.latest?.bodies[0].particles[0][0]).toBe(999);
        // bounded memory: the model holds one frame, not a queue
        const owned = Object.values(scene).filter(
            (v) => v !== null && typeof v === "object");
        expect(owned.length).toBeLessThanOrEqual(3); // latest, stats, selection
    });
});

describe("bounds center", () => {
    it("is the midpoint of the particle bounding box", () => {
        const scene = new SceneModel();
        scene.decodeFrame(frame(0, [[-1, 0, 2], [3, 4, -2], [0, 0, 0]]));
        expect(scene.boundsCenter()).toEqual({ x: 1, y: 2, z: 0 });
    });

    it("is null before any frame or for empty scenes", () => {
        const scene = new SceneModel();
        expect(scene.boundsCenter()).toBeNull();
        scene.decodeFrame(JSON.stringify({
            type: "frame", t: 0, bodies: [],
            stats: { steps_per_s: 0, step_ms: 0, degenerate_springs: 0 },
        }));
        expect(scene.boundsCenter()).toBeNull();
    });
});

describe("nearest particle oracle", () => {
    it("finds the closest particle across bodies", () => {
        const scene = new SceneModel();
        const f = {
            type: "frame", t: 0,
            bodies: [
                { id: 0, particles: [[0, 0, 0], [2, 0, 0]], springs: [], tentacles: [] },
                { id: 1, particles: [[0.4, 0.1, 0]], springs: [], tentacles: [] },
            ],
            stats: { steps_per_s: 0, step_ms: 0, degenerate_springs: 0 },
        };
        scene.decodeFrame(JSON.stringify(f));
        expect(scene.nearestParticle(0.5, 0, 0)).toEqual({ body: 1, particle: 0 });
        expect(scene.nearestParticle(2.1, 0, 0)).toEqual({ body: 0, particle: 1 });
    });
});
