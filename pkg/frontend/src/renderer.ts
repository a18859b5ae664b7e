// Canvas renderer: particles as dots, springs as lines, tentacles as
// polylines. Wireframe only; the simulation is the show, not the shading.

import { Camera, Camera2D, OrbitCamera, Pixel } from "./camera.js";
import { Frame } from "./protocol.js";

const SPRING_COLOR = "#4d7ea8";
const PARTICLE_COLOR = "#e8f1f2";
const TENTACLE_COLOR = "#8fd19e";
const SELECTED_COLOR = "#ffcc55";

function project(camera: Camera, p: number[]): Pixel | null {
    if (camera instanceof Camera2D) {
        return camera.worldToScreen(p[0], p[1]);
    }
    return (camera as OrbitCamera).worldToScreen(p[0], p[1], p[2]);
}

export function renderFrame(
    ctx: CanvasRenderingContext2D,
    frame: Frame,
    camera: Camera,
    selection: { body: number; particle: number } | null,
): void {
    ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
    for (const body of frame.bodies) {
        const projected = body.particles.map((p) => project(camera, p));
        ctx.strokeStyle = SPRING_COLOR;
        ctx.lineWidth = 1;
        ctx.beginPath();
        for (const [a, b] of body.springs) {
            const pa = projected[a];
            const pb = projected[b];
            if (!pa || !pb) continue;
            ctx.moveTo(pa.x, pa.y);
            ctx.lineTo(pb.x, pb.y);
        }
        ctx.stroke();

        ctx.strokeStyle = TENTACLE_COLOR;
        ctx.lineWidth = 2;
        for (const chain of body.tentacles) {
            ctx.beginPath();
            let started = false;
            for (const joint of chain) {
                const px = project(camera, joint);
                if (!px) continue;
                if (started) ctx.lineTo(px.x, px.y);
                else ctx.moveTo(px.x, px.y);
                started = true;
            }
            ctx.stroke();
        }

        ctx.fillStyle = PARTICLE_COLOR;
        for (let i = 0; i < projected.length; i++) {
            const px = projected[i];
            if (!px) continue;
            const picked = selection && selection.body === body.id && selection.particle === i;
            if (picked) ctx.fillStyle = SELECTED_COLOR;
            ctx.beginPath();
            ctx.arc(px.x, px.y, picked ? 4 : 2.5, 0, Math.PI * 2);
            ctx.fill();
            if (picked) ctx.fillStyle = PARTICLE_COLOR;
        }
    }
}

export function renderStats(
    statsEl: HTMLElement,
    frame: Frame | null,
): void {
    if (!frame) {
        statsEl.textContent = "waiting for frames...";
        return;
    }
    const s = frame.stats;
    statsEl.textContent =
        `t=${frame.t.toFixed(3)} s | ${s.steps_per_s} steps/s | ` +
        `${s.step_ms} ms/step | degenerate springs: ${s.degenerate_springs}`;
}
