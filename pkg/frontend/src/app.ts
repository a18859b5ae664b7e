// Application wiring: socket, scene, cameras, panel, and pointer gestures.
// Connects to ws://host:port from the ?host= and ?port= query parameters
// (default localhost:8765) and renders the newest frame on every animation
// tick.

import { Camera, Camera2D, OrbitCamera } from "./camera.js";
import {
    encodeDragEnd, encodeDragMove, encodeDragStart, encodeListParams,
    encodePause, encodeResume, encodeSetIntegrator, encodeSetParam, encodeStep,
} from "./commands.js";
import { ParamPanel } from "./panel.js";
import { isHello, isParamListing, PROTO_VERSION } from "./protocol.js";
import { renderFrame, renderStats } from "./renderer.js";
import { SceneModel } from "./scene.js";

const query = new URLSearchParams(window.location.search);
const host = query.get("host") ?? (window.location.hostname || "127.0.0.1");
const port = query.get("port") ?? "8765";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d") as CanvasRenderingContext2D;
const statsEl = document.getElementById("stats") as HTMLElement;
const panelRoot = document.getElementById("panel") as HTMLElement;
const buttons = {
    pause: document.getElementById("pause") as HTMLButtonElement,
    resume: document.getElementById("resume") as HTMLButtonElement,
    step: document.getElementById("step") as HTMLButtonElement,
    view: document.getElementById("toggle-view") as HTMLButtonElement,
};

const scene = new SceneModel();
const camera2d = new Camera2D(0, 2.5, 120, canvas.width, canvas.height);
const orbit = new OrbitCamera();
orbit.viewWidth = canvas.width;
orbit.viewHeight = canvas.height;
let camera: Camera = camera2d;

const socket = new WebSocket(`ws://${host}:${port}`);
const panel = new ParamPanel(panelRoot, encodeSetParam, encodeSetIntegrator,
    (msg) => sendThenRefresh(msg));

function send(message: string): void {
    if (socket.readyState === WebSocket.OPEN) socket.send(message);
}

// Server-authoritative panel: after any mutation, re-read the listing so the
// widgets show what the server actually accepted.
function sendThenRefresh(message: string): void {
    send(message);
    send(encodeListParams());
}

socket.onopen = () => send(encodeListParams());
socket.onmessage = (event) => {
    if (scene.decodeFrame(String(event.data))) return;
    let msg: unknown;
    try {
        msg = JSON.parse(String(event.data));
    } catch {
        return;
    }
    if (isHello(msg)) {
        if (msg.proto !== PROTO_VERSION) {
            statsEl.textContent = `protocol mismatch: server speaks v${msg.proto}`;
        }
        return;
    }
    if (isParamListing(msg)) {
        panel.update(msg);
        return;
    }
    const reply = msg as { ok?: boolean; body?: number; particle?: number; error?: string };
    if (reply.ok && reply.particle !== undefined) {
        scene.selection = { body: reply.body ?? 0, particle: reply.particle };
    } else if (reply.ok === false && reply.error) {
        console.warn("command rejected:", reply.error);
    }
};
socket.onclose = () => {
    statsEl.textContent = "disconnected";
};

buttons.pause.onclick = () => send(encodePause());
buttons.resume.onclick = () => send(encodeResume());
buttons.step.onclick = () => send(encodeStep(1));
buttons.view.onclick = () => {
    camera = camera === camera2d ? orbit : camera2d;
};

// Pointer gestures: primary button drags the nearest particle, secondary
// button pans (2D) or orbits (3D), wheel zooms.
let dragging = false;
let panning = false;
let lastPointer = { x: 0, y: 0 };

function canvasPixel(ev: PointerEvent) {
    const rect = canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

canvas.addEventListener("pointerdown", (ev) => {
    const px = canvasPixel(ev);
    lastPointer = px;
    if (ev.button === 0) {
        const w = camera.screenToWorld(px);
        dragging = true;
        send(encodeDragStart(w.x, w.y, w.z));
    } else {
        panning = true;
    }
    canvas.setPointerCapture(ev.pointerId);
});
canvas.addEventListener("pointermove", (ev) => {
    const px = canvasPixel(ev);
    if (dragging) {
        const w = camera.screenToWorld(px);
        send(encodeDragMove(w.x, w.y, w.z));
    } else if (panning) {
        if (camera instanceof Camera2D) {
            camera.panByPixels(px.x - lastPointer.x, px.y - lastPointer.y);
        } else {
            (camera as OrbitCamera).orbitByPixels(px.x - lastPointer.x, px.y - lastPointer.y);
        }
    }
    lastPointer = px;
});
canvas.addEventListener("pointerup", () => {
    if (dragging) {
        send(encodeDragEnd());
        scene.selection = null;
    }
    dragging = false;
    panning = false;
});
canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    if (camera instanceof Camera2D) {
        camera.zoomBy(ev.deltaY < 0 ? 1.1 : 1 / 1.1);
    } else {
        (camera as OrbitCamera).distance *= ev.deltaY < 0 ? 1 / 1.1 : 1.1;
    }
});
canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());

function tick(): void {
    if (scene.latest) {
        if (camera === orbit) {
            // 3D picking works off the ray's closest approach to the scene
            // center, so the orbit target follows the bodies.
            const center = scene.boundsCenter();
            if (center) {
                orbit.targetX += (center.x - orbit.targetX) * 0.05;
                orbit.targetY += (center.y - orbit.targetY) * 0.05;
                orbit.targetZ += (center.z - orbit.targetZ) * 0.05;
            }
        }
        renderFrame(ctx, scene.latest, camera, scene.selection);
    }
    renderStats(statsEl, scene.latest);
    requestAnimationFrame(tick);
}
requestAnimationFrame(tick);
