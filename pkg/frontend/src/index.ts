export { readTrace, roundRows, SchemaMismatch, REQUIRED_COLUMNS } from "./csv.js";
export type { TraceRow } from "./csv.js";
export { renderPanel, renderConvergence } from "./figure.js";
export type { FigureSpec } from "./figure.js";
