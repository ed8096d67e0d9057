/* tslint:disable */
/* eslint-disable */

/**
 * What the page draws: open edges as flat `u, v` pairs, one colour label
 * per vertex, and a line of text.
 */
export class Picture {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly edges: Uint32Array;
    readonly labels: Uint32Array;
    readonly side: number;
    readonly summary: string;
}

export function percolate(radius: number, p: number, seed: bigint): Picture;

export function spanningForest(radius: number, wired: boolean, seed: bigint): Picture;

export function trimClusters(radius: number, p: number, h: string, seed: bigint): Picture;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_picture_free: (a: number, b: number) => void;
    readonly percolate: (a: number, b: number, c: bigint) => [number, number, number];
    readonly picture_edges: (a: number) => [number, number];
    readonly picture_labels: (a: number) => [number, number];
    readonly picture_side: (a: number) => number;
    readonly picture_summary: (a: number) => [number, number];
    readonly spanningForest: (a: number, b: number, c: bigint) => [number, number, number];
    readonly trimClusters: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
