import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterEach, describe, expect, it } from "vitest";

import { REQUIRED_COLUMNS, SchemaMismatch, readTrace, roundRows } from "../src/csv.js";

const FIXTURE = path.join(__dirname, "fixtures", "adversarial-p100.csv");
const tmpFiles: string[] = [];

function tempCsv(text: string): string {
  const file = path.join(os.tmpdir(), `trace-${Math.random().toString(36).slice(2)}.csv`);
  fs.writeFileSync(file, text);
  tmpFiles.push(file);
  return file;
}

afterEach(() => {
  while (tmpFiles.length) fs.rmSync(tmpFiles.pop()!, { force: true });
});

describe("readTrace", () => {
  it("parses the real experiment fixture", () => {
    const rows = readTrace(FIXTURE);
    expect(rows.length).toBe(25 * 11);
    const r10 = roundRows(rows, 10);
    expect(r10.length).toBe(11);
    expect(r10.map((r) => r.quantile)).toEqual(
      [0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99]);
    for (const row of rows) {
      expect(row.re_min).toBeLessThanOrEqual(row.re_median);
      expect(row.re_median).toBeLessThanOrEqual(row.re_max);
      expect(row.online_peers).toBe(100);
    }
  });

  it("names the missing column", () => {
    const file = tempCsv("round,quantile,are\n1,0.5,0.0\n");
    expect(() => readTrace(file)).toThrow(SchemaMismatch);
    expect(() => readTrace(file)).toThrow(/missing column 're_min'/);
  });

  it("rejects truncated rows", () => {
    const file = tempCsv(REQUIRED_COLUMNS.join(",") + "\n1,0.5\n");
    expect(() => readTrace(file)).toThrow(SchemaMismatch);
  });

  it("rejects an empty file", () => {
    expect(() => readTrace(tempCsv(""))).toThrow(SchemaMismatch);
  });
});
