// Wire protocol types shared with the simulation service.

export const PROTO_VERSION = 1;

export interface FrameBody {
    id: number;
    particles: number[][];
    springs: number[][];
    tentacles: number[][][];
}

export interface FrameStats {
    steps_per_s: number;
    step_ms: number;
    degenerate_springs: number;
}

export interface Frame {
    type: "frame";
    t: number;
    bodies: FrameBody[];
    stats: FrameStats;
}

export interface Hello {
    type: "hello";
    proto: number;
}

export interface ParamListing {
    ok: boolean;
    params: Record<string, number | string | boolean>;
    bounds: Record<string, [number, number]>;
}

export type Reply = { ok: boolean; [key: string]: unknown };

export function isFrame(msg: unknown): msg is Frame {
    const m = msg as Frame;
    return !!m && m.type === "frame" && Array.isArray(m.bodies)
        && typeof m.t === "number";
}

export function isHello(msg: unknown): msg is Hello {
    const m = msg as Hello;
    return !!m && m.type === "hello" && typeof m.proto === "number";
}

export function isParamListing(msg: unknown): msg is ParamListing {
    const m = msg as ParamListing;
    return !!m && m.ok === true && typeof m.params === "object" && m.params !== null;
}
