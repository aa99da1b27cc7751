/* tslint:disable */
/* eslint-disable */

/**
 * Sampled decay curves returned by [`stabilize`].
 */
export class Curves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Same quantity with the control switched off.
     */
    readonly baseline: Float64Array;
    /**
     * `-ln` of the shifted error ratio across each window.
     */
    readonly log_reductions: Float64Array;
    /**
     * `e^{lambda_1 t} ||u - psi_1||` under the window controls.
     */
    readonly shifted: Float64Array;
    readonly times: Float64Array;
}

/**
 * `modes` eigenfunctions on `samples` equispaced points of `[0, 1]`, row-major by mode.
 */
export function eigenfunctions(alpha: number, modes: number, samples: number): Float64Array;

/**
 * `|b_1k| lambda_k^{3/2}` for `k = 2..=count`, the scaled first row of the control operator.
 */
export function scaled_first_row(alpha: number, count: number): Float64Array;

/**
 * Eigenvalues `lambda_1..lambda_count`.
 */
export function spectrum(alpha: number, count: number): Float64Array;

/**
 * Window-controlled and uncontrolled decay from `phi_1 + eps phi_2`.
 */
export function stabilize(alpha: number, modes: number, windows: number, window_length: number, eps: number): Curves;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curves_free: (a: number, b: number) => void;
    readonly curves_baseline: (a: number) => [number, number];
    readonly curves_log_reductions: (a: number) => [number, number];
    readonly curves_shifted: (a: number) => [number, number];
    readonly curves_times: (a: number) => [number, number];
    readonly eigenfunctions: (a: number, b: number, c: number) => [number, number, number, number];
    readonly scaled_first_row: (a: number, b: number) => [number, number, number, number];
    readonly spectrum: (a: number, b: number) => [number, number, number, number];
    readonly stabilize: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
