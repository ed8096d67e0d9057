/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_picture_free: (a: number, b: number) => void;
export const percolate: (a: number, b: number, c: bigint) => [number, number, number];
export const picture_edges: (a: number) => [number, number];
export const picture_labels: (a: number) => [number, number];
export const picture_side: (a: number) => number;
export const picture_summary: (a: number) => [number, number];
export const spanningForest: (a: number, b: number, c: bigint) => [number, number, number];
export const trimClusters: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
