/* tslint:disable */
/* eslint-disable */

/**
 * One coefficient of the layer (`a`, `b`, `c`, `beta_x`, `beta_y`) on an
 * `nx × ny` grid over `[-a-L, a+L] × [-d-L, 0]`, row-major from the top.
 */
export function layer_map(half_width: number, depth: number, width: number, c_p: number, alpha0: number, multiaxial: boolean, ratio: number, field: string, nx: number, ny: number): Float64Array;

export function material_names(): string[];

/**
 * `[ρ, ρ_w, α, M, f_c, c_1p, c_2p, c_s]` of a shipped material set.
 */
export function material_summary(name: string): Float64Array;

export function pulse_duration(frequency: number): number;

/**
 * `n` samples of the unit Ricker pulse on `[0, t_end]`.
 */
export function ricker_curve(frequency: number, t_end: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly layer_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number) => [number, number, number, number];
    readonly material_names: () => [number, number];
    readonly material_summary: (a: number, b: number) => [number, number, number, number];
    readonly pulse_duration: (a: number) => number;
    readonly ricker_curve: (a: number, b: number, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
