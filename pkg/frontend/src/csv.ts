/** Parsing and validation of the experiment trace CSV. */

import * as fs from "fs";

/** One (round, quantile) row of a trace file. */
export interface TraceRow {
  round: number;
  quantile: number;
  are: number;
  re_min: number;
  re_q1: number;
  re_median: number;
  re_q3: number;
  re_max: number;
  online_peers: number;
  p_est_mode: number;
}

export const REQUIRED_COLUMNS = [
  "round", "quantile", "are", "re_min", "re_q1", "re_median", "re_q3",
  "re_max", "online_peers", "p_est_mode",
] as const;

export class SchemaMismatch extends Error {}

/**
 * Parse a trace file, validating that every documented column is present.
 * The renderer never recomputes statistics; it consumes these rows as-is.
 */
export function readTrace(path: string): TraceRow[] {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaMismatch(`${path}: empty file`);
  }
  const header = lines[0].split(",");
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaMismatch(`${path}: missing column '${column}'`);
    }
  }
  const index = new Map(header.map((name, i) => [name, i]));
  const rows: TraceRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length < header.length) {
      throw new SchemaMismatch(`${path}:${i + 1}: expected ${header.length} fields`);
    }
    const num = (name: string) => Number(fields[index.get(name)!]);
    rows.push({
      round: num("round"),
      quantile: num("quantile"),
      are: num("are"),
      re_min: num("re_min"),
      re_q1: num("re_q1"),
      re_median: num("re_median"),
      re_q3: num("re_q3"),
      re_max: num("re_max"),
      online_peers: num("online_peers"),
      p_est_mode: num("p_est_mode"),
    });
  }
  return rows;
}

/** Rows of one round, sorted by quantile. */
export function roundRows(rows: TraceRow[], round: number): TraceRow[] {
  return rows
    .filter((row) => row.round === round)
    .sort((a, b) => a.quantile - b.quantile);
}
