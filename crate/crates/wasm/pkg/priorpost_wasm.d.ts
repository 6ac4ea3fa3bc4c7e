/* tslint:disable */
/* eslint-disable */

/**
 * Empirical and exact posterior CDF on a grid.
 */
export class CdfCurves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly empirical: Float64Array;
    readonly exact: Float64Array;
    readonly grid: Float64Array;
    readonly ks: number;
    /**
     * Number of draws in the approximation (the LAPS bag can exceed `n`).
     */
    readonly sampleSize: number;
}

/**
 * Distance of LAPS and SLIPS from LIPS on one batch.
 */
export class Convergence {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `c` for LAPS, `m / n` for SLIPS.
     */
    readonly amount: Float64Array;
    /**
     * Largest half-line probability error of LAPS.
     */
    readonly lapsError: Float64Array;
    /**
     * Total variation between SLIPS source frequencies and LIPS weights.
     */
    readonly slipsTv: Float64Array;
}

/**
 * Plug-in and exact `Π₀(f²)/Π₀(f)²` over information levels.
 */
export class Sweep {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly estimate: Float64Array;
    readonly exact: Float64Array;
    readonly t: Float64Array;
}

/**
 * On one batch of `n` draws, for amplification `a = 1, 10, …, 10^(decades-1)`:
 * LAPS with `c = a` and SLIPS with `m = a·n`.
 */
export function convergence(x: number, n: number, decades: number, seed: bigint): Convergence;

/**
 * `exp(d2_hat)` from `n` draws and its quadrature value for `t = 1, 2, 4, …, t_max`.
 */
export function informationSweep(x: number, n: number, t_max: number, seed: bigint): Sweep;

/**
 * Posterior CDF of `theta` after `t` unit-variance observations with mean
 * `x` under a N(0, 1) prior, approximated by `algorithm` ("lips", "laps"
 * or "slips") from `n` prior draws. `amount` is `c` for LAPS and `m` for
 * SLIPS and is ignored for LIPS.
 */
export function posteriorCdf(algorithm: string, x: number, t: number, n: number, amount: number, seed: bigint, points: number): CdfCurves;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_cdfcurves_free: (a: number, b: number) => void;
    readonly __wbg_convergence_free: (a: number, b: number) => void;
    readonly __wbg_sweep_free: (a: number, b: number) => void;
    readonly cdfcurves_empirical: (a: number) => [number, number];
    readonly cdfcurves_exact: (a: number) => [number, number];
    readonly cdfcurves_grid: (a: number) => [number, number];
    readonly cdfcurves_ks: (a: number) => number;
    readonly cdfcurves_sampleSize: (a: number) => number;
    readonly convergence: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly convergence_amount: (a: number) => [number, number];
    readonly convergence_lapsError: (a: number) => [number, number];
    readonly convergence_slipsTv: (a: number) => [number, number];
    readonly informationSweep: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly posteriorCdf: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint, h: number) => [number, number, number];
    readonly sweep_estimate: (a: number) => [number, number];
    readonly sweep_exact: (a: number) => [number, number];
    readonly sweep_t: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
