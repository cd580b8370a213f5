/* tslint:disable */
/* eslint-disable */

/**
 * Rows of `[λ, W, T_soj]` with a one-second frame; NaN past saturation.
 */
export function delay_curve(lambda_lo: number, lambda_hi: number, points: number, snr_db: number, rate_r1: number, max_rounds: number): Float64Array;

/**
 * Rows of `[snr_db, exact, bound, no_relay]` for `M` rounds at rate `R₁`.
 */
export function outage_curves(snr_lo: number, snr_hi: number, points: number, rate_r1: number, max_rounds: number): Float64Array;

/**
 * Rows of `[snr_db, N̄, R̄, η]` from the exact outage family.
 */
export function throughput_curves(snr_lo: number, snr_hi: number, points: number, rate_r1: number, max_rounds: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly delay_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly outage_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly throughput_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
