// Cameras: a pan/zoom 2D view and an orbiting wireframe view for 3D scenes.
// screenToWorld is the exact inverse of the active projection for the 2D
// camera; the orbit camera picks by closest approach of the view ray to the
// scene center, which the server then resolves to a particle.

export interface Pixel {
    x: number;
    y: number;
}

export interface Vec {
    x: number;
    y: number;
    z: number;
}

export class Camera2D {
    // world coordinates of the canvas center, and pixels per meter
    constructor(
        public centerX = 0,
        public centerY = 2.5,
        public scale = 120,
        public viewWidth = 800,
        public viewHeight = 600,
    ) {}

    worldToScreen(wx: number, wy: number): Pixel {
        return {
            x: this.viewWidth / 2 + (wx - this.centerX) * this.scale,
            y: this.viewHeight / 2 - (wy - this.centerY) * this.scale,
        };
    }

    screenToWorld(px: Pixel): Vec {
        return {
            x: this.centerX + (px.x - this.viewWidth / 2) / this.scale,
            y: this.centerY - (px.y - this.viewHeight / 2) / this.scale,
            z: 0,
        };
    }

    zoomBy(factor: number): void {
        this.scale *= factor;
    }

    panByPixels(dx: number, dy: number): void {
        this.centerX -= dx / this.scale;
        this.centerY += dy / this.scale;
    }
}

export class OrbitCamera {
    constructor(
        public yaw = 0.6,
        public pitch = 0.35,
        public distance = 6,
        public targetX = 0,
        public targetY = 2.5,
        public targetZ = 0,
        public viewWidth = 800,
        public viewHeight = 600,
        public focal = 500,
    ) {}

    private basis() {
        const cy = Math.cos(this.yaw), sy = Math.sin(this.yaw);
        const cp = Math.cos(this.pitch), sp = Math.sin(this.pitch);
        // camera looks at the target from yaw/pitch on a sphere
        const forward = { x: -cy * cp, y: -sp, z: -sy * cp };
        const right = { x: -sy, y: 0, z: cy };
        const up = {
            x: right.y * forward.z - right.z * forward.y,
            y: right.z * forward.x - right.x * forward.z,
            z: right.x * forward.y - right.y * forward.x,
        };
        return { forward, right, up };
    }

    eye(): Vec {
        const { forward } = this.basis();
        return {
            x: this.targetX - forward.x * this.distance,
            y: this.targetY - forward.y * this.distance,
            z: this.targetZ - forward.z * this.distance,
        };
    }

    worldToScreen(wx: number, wy: number, wz: number): Pixel | null {
        const { forward, right, up } = this.basis();
        const e = this.eye();
        const dx = wx - e.x, dy = wy - e.y, dz = wz - e.z;
        const zc = dx * forward.x + dy * forward.y + dz * forward.z;
        if (zc <= 1e-6) return null; // behind the camera
        const xc = dx * right.x + dy * right.y + dz * right.z;
        const yc = dx * up.x + dy * up.y + dz * up.z;
        return {
            x: this.viewWidth / 2 + (xc / zc) * this.focal,
            y: this.viewHeight / 2 - (yc / zc) * this.focal,
        };
    }

    /** Drag pick support: the point on the view ray through the pixel that
     *  is nearest to the orbit target (the scene bounding-box center). */
    screenToWorld(px: Pixel): Vec {
        const { forward, right, up } = this.basis();
        const e = this.eye();
        const xc = (px.x - this.viewWidth / 2) / this.focal;
        const yc = (this.viewHeight / 2 - px.y) / this.focal;
        let rx = forward.x + right.x * xc + up.x * yc;
        let ry = forward.y + right.y * xc + up.y * yc;
        let rz = forward.z + right.z * xc + up.z * yc;
        const n = Math.hypot(rx, ry, rz);
        rx /= n; ry /= n; rz /= n;
        const tox = this.targetX - e.x, toy = this.targetY - e.y, toz = this.targetZ - e.z;
        const s = tox * rx + toy * ry + toz * rz;
        return { x: e.x + rx * s, y: e.y + ry * s, z: e.z + rz * s };
    }

    orbitByPixels(dx: number, dy: number): void {
        this.yaw += dx * 0.008;
        this.pitch = Math.max(-1.4, Math.min(1.4, this.pitch + dy * 0.008));
    }
}

export type Camera = Camera2D | OrbitCamera;

export function screenToWorld(pixel: Pixel, camera: Camera): Vec {
    return camera.screenToWorld(pixel);
}
