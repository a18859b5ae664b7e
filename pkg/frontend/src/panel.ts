// The LOD parameter panel: dimensionality checkboxes, an integrator radio
// group, and numeric spinners for force coefficients, masses, geometry and
// collision knobs. The server is the source of truth: every widget shows the
// value from the latest list_params reply, and edits are sent as commands and
// re-read after the acknowledgement.

import { ParamListing } from "./protocol.js";

export const INTEGRATORS = ["euler", "midpoint", "feynman", "rk4"];

export interface WidgetSpec {
    kind: "checkbox" | "radio" | "number";
    name: string;            // dotted parameter name ("integrator" for the radio)
    label: string;
    section: string;
    value: number | string | boolean;
    min?: number;
    max?: number;
    step?: number;
    options?: string[];
}

const SECTION_OF_PREFIX: Record<string, string> = {
    toggles: "Dimensionality",
    ks: "Force Coefficients",
    kd: "Force Coefficients",
    gravity: "Forces",
    geometry: "Geometry",
    collision: "Collision",
};

function sectionFor(name: string): string {
    const prefix = name.split(".")[0];
    return SECTION_OF_PREFIX[prefix] ?? "Simulation";
}

function stepFor(name: string, value: number): number {
    if (name === "dt") return 0.001;
    if (name.startsWith("geometry.")) return 1;
    if (name === "collision.restitution") return 0.05;
    return Math.abs(value) >= 10 ? 1 : 0.1;
}

/** Turn a list_params reply into an ordered widget list. Pure, testable. */
export function widgetsFromListing(listing: ParamListing): WidgetSpec[] {
    const widgets: WidgetSpec[] = [];
    widgets.push({
        kind: "radio",
        name: "integrator",
        label: "integrator",
        section: "Integrator",
        value: listing.params["integrator"],
        options: INTEGRATORS,
    });
    for (const [name, value] of Object.entries(listing.params)) {
        if (name === "integrator") continue;
        if (typeof value === "boolean") {
            widgets.push({
                kind: "checkbox", name, label: name.replace("toggles.", ""),
                section: sectionFor(name), value,
            });
            continue;
        }
        if (typeof value !== "number") continue;
        const bounds = listing.bounds?.[name];
        widgets.push({
            kind: "number", name, label: name, section: sectionFor(name),
            value,
            min: bounds?.[0], max: bounds?.[1],
            step: stepFor(name, value),
        });
    }
    return widgets;
}

export type SendFn = (message: string) => void;

export class ParamPanel {
    private inputs = new Map<string, HTMLInputElement | HTMLInputElement[]>();

    constructor(
        private root: HTMLElement,
        private encodeSetParam: (name: string, value: number | string | boolean) => string,
        private encodeSetIntegrator: (id: string) => string,
        private send: SendFn,
    ) {}

    /** (Re)build the panel from a fresh server listing. */
    update(listing: ParamListing): void {
        const widgets = widgetsFromListing(listing);
        if (this.inputs.size === 0) {
            this.build(widgets);
        }
        for (const w of widgets) {
            const entry = this.inputs.get(w.name);
            if (!entry) continue;
            if (Array.isArray(entry)) {
                for (const radio of entry) radio.checked = radio.value === w.value;
            } else if (w.kind === "checkbox") {
                entry.checked = Boolean(w.value);
            } else if (document.activeElement !== entry) {
                entry.value = String(w.value);
            }
        }
    }

    private build(widgets: WidgetSpec[]): void {
        const doc = this.root.ownerDocument;
        const sections = new Map<string, HTMLElement>();
        const sectionEl = (name: string) => {
            let el = sections.get(name);
            if (!el) {
                el = doc.createElement("fieldset");
                const legend = doc.createElement("legend");
                legend.textContent = name;
                el.appendChild(legend);
                sections.set(name, el);
                this.root.appendChild(el);
            }
            return el;
        };
        for (const w of widgets) {
            const host = sectionEl(w.section);
            const row = doc.createElement("label");
            row.className = "param-row";
            if (w.kind === "radio") {
                const radios: HTMLInputElement[] = [];
                for (const option of w.options ?? []) {
                    const radio = doc.createElement("input");
                    radio.type = "radio";
                    radio.name = "integrator";
                    radio.value = option;
                    radio.checked = option === w.value;
                    radio.addEventListener("change", () => {
                        if (radio.checked) this.send(this.encodeSetIntegrator(option));
                    });
                    const lab = doc.createElement("label");
                    lab.appendChild(radio);
                    lab.append(option);
                    host.appendChild(lab);
                    radios.push(radio);
                }
                this.inputs.set(w.name, radios);
                continue;
            }
            const input = doc.createElement("input");
            if (w.kind === "checkbox") {
                input.type = "checkbox";
                input.checked = Boolean(w.value);
                input.addEventListener("change", () => {
                    this.send(this.encodeSetParam(w.name, input.checked));
                });
            } else {
                input.type = "number";
                input.value = String(w.value);
                if (w.min !== undefined) input.min = String(w.min);
                if (w.max !== undefined) input.max = String(w.max);
                if (w.step !== undefined) input.step = String(w.step);
                input.addEventListener("change", () => {
                    let v = Number(input.value);
                    if (!Number.isFinite(v)) return;
                    if (w.min !== undefined) v = Math.max(w.min, v);
                    if (w.max !== undefined) v = Math.min(w.max, v);
                    this.send(this.encodeSetParam(w.name, v));
                });
            }
            row.append(w.label);
            row.appendChild(input);
            host.appendChild(row);
            this.inputs.set(w.name, input);
        }
    }
}
