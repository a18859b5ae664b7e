// UI actions -> command messages. One function per gesture/widget family so
// the panel and canvas stay free of protocol details.

export function encodeSetParam(name: string, value: number | string | boolean): string {
    return JSON.stringify({ cmd: "set_param", name, value });
}

export function encodeSetIntegrator(id: string): string {
    return JSON.stringify({ cmd: "set_integrator", value: id });
}

export function encodeDragStart(x: number, y: number, z = 0): string {
    return JSON.stringify({ cmd: "drag", phase: "start", x, y, z });
}

export function encodeDragMove(x: number, y: number, z = 0): string {
    return JSON.stringify({ cmd: "drag", phase: "move", x, y, z });
}

export function encodeDragEnd(): string {
    return JSON.stringify({ cmd: "drag", phase: "end" });
}

export function encodePause(): string {
    return JSON.stringify({ cmd: "pause" });
}

export function encodeResume(): string {
    return JSON.stringify({ cmd: "resume" });
}

export function encodeStep(n = 1): string {
    return JSON.stringify({ cmd: "step", n });
}

export function encodeListParams(): string {
    return JSON.stringify({ cmd: "list_params" });
}

export function encodeSpawn(scenario: string): string {
    return JSON.stringify({ cmd: "spawn", scenario });
}
