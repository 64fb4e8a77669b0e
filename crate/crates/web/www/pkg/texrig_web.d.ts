/* tslint:disable */
/* eslint-disable */

/**
 * Texel field preview as `res` x `res` RGBA: the third Jacobian column
 * (where the rest normal goes) as a color, black where no face covers.
 */
export function field_preview(angle_deg: number, res: number): Uint8Array;

/**
 * Renders the folded strip with striped colors as `size` x `size` RGBA.
 */
export function render_strip(angle_deg: number, quasi_phong: boolean, res: number, size: number): Uint8Array;

/**
 * Seam gaps between neighbouring texels of the two faces, as
 * `[quasi_phong_max, naive_max, quasi_phong_mean, naive_mean]`.
 */
export function seam_gaps(angle_deg: number, res: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly field_preview: (a: number, b: number) => [number, number, number, number];
    readonly render_strip: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly seam_gaps: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
