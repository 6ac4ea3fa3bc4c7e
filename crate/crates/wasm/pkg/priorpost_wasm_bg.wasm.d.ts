/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_cdfcurves_free: (a: number, b: number) => void;
export const __wbg_convergence_free: (a: number, b: number) => void;
export const __wbg_sweep_free: (a: number, b: number) => void;
export const cdfcurves_empirical: (a: number) => [number, number];
export const cdfcurves_exact: (a: number) => [number, number];
export const cdfcurves_grid: (a: number) => [number, number];
export const cdfcurves_ks: (a: number) => number;
export const cdfcurves_sampleSize: (a: number) => number;
export const convergence: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const convergence_amount: (a: number) => [number, number];
export const convergence_lapsError: (a: number) => [number, number];
export const convergence_slipsTv: (a: number) => [number, number];
export const informationSweep: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const posteriorCdf: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint, h: number) => [number, number, number];
export const sweep_estimate: (a: number) => [number, number];
export const sweep_exact: (a: number) => [number, number];
export const sweep_t: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
