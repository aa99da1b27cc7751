/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curves_free: (a: number, b: number) => void;
export const curves_baseline: (a: number) => [number, number];
export const curves_log_reductions: (a: number) => [number, number];
export const curves_shifted: (a: number) => [number, number];
export const curves_times: (a: number) => [number, number];
export const eigenfunctions: (a: number, b: number, c: number) => [number, number, number, number];
export const scaled_first_row: (a: number, b: number) => [number, number, number, number];
export const spectrum: (a: number, b: number) => [number, number, number, number];
export const stabilize: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
