/** Box-and-whisker SVG panels, one per round.
 *
 * A panel puts the quantile set on the x axis and the distribution of
 * per-peer relative errors on the y axis: whiskers span re_min..re_max,
 * the box spans the quartiles, and a heavier line marks the median.  The
 * output is a pure function of the parsed rows, so identical CSV input
 * produces identical SVG bytes.
 */

import * as fs from "fs";
import * as path from "path";

import { SchemaMismatch, TraceRow, readTrace, roundRows } from "./csv.js";

export interface FigureSpec {
  csvPaths: string[];
  rounds: number[];
  outDir: string;
  /** "{round}" and "{source}" placeholders are substituted. */
  titleTemplate?: string;
  logY?: boolean;
}

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { top: 40, right: 20, bottom: 56, left: 72 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const fmt = (v: number) => v.toFixed(2);

function yScale(rows: TraceRow[], logY: boolean): (v: number) => number {
  const top = Math.max(...rows.map((r) => r.re_max), 0);
  if (!logY) {
    const span = top > 0 ? top : 1;
    return (v) => MARGIN.top + PLOT_H - (v / span) * PLOT_H;
  }
  const positives = rows.flatMap((r) => [r.re_min, r.re_q1, r.re_median, r.re_q3, r.re_max])
    .filter((v) => v > 0);
  const lo = positives.length ? Math.min(...positives) : 1e-12;
  const hi = Math.max(top, lo * 10);
  const logLo = Math.log10(lo);
  const logSpan = Math.log10(hi) - logLo || 1;
  return (v) => {
    const clamped = Math.max(v, lo);
    return MARGIN.top + PLOT_H - ((Math.log10(clamped) - logLo) / logSpan) * PLOT_H;
  };
}

function yTickValues(rows: TraceRow[], logY: boolean): number[] {
  const top = Math.max(...rows.map((r) => r.re_max), 0);
  if (!logY) {
    const span = top > 0 ? top : 1;
    return [0, 0.25, 0.5, 0.75, 1].map((f) => f * span);
  }
  const ticks: number[] = [];
  const positives = rows.flatMap((r) => [r.re_min, r.re_max]).filter((v) => v > 0);
  const lo = positives.length ? Math.min(...positives) : 1e-12;
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(Math.max(top, lo))); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

/** Render one round of one trace as a standalone SVG document. */
export function renderPanel(rows: TraceRow[], round: number, title: string,
                            logY = false): string {
  const panel = roundRows(rows, round);
  if (panel.length === 0) {
    throw new SchemaMismatch(`no rows for round ${round}`);
  }
  const y = yScale(panel, logY);
  const step = PLOT_W / panel.length;
  const boxWidth = Math.min(36, step * 0.6);
  const axisY = MARGIN.top + PLOT_H;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text class="title" x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${title}</text>`);
  // axes
  parts.push(`<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + PLOT_W}" y2="${axisY}" stroke="black"/>`);
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="black"/>`);
  parts.push(`<text class="x-label" x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="13">quantile</text>`);
  parts.push(`<text class="y-label" x="16" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${MARGIN.top + PLOT_H / 2})">relative error</text>`);
  for (const tick of yTickValues(panel, logY)) {
    const ty = y(tick);
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${fmt(ty)}" x2="${MARGIN.left}" y2="${fmt(ty)}" stroke="black"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${fmt(ty + 4)}" text-anchor="end" font-size="10">${tick.toExponential(1)}</text>`);
  }
  // one box-and-whisker group per quantile
  panel.forEach((row, i) => {
    const cx = MARGIN.left + step * (i + 0.5);
    const half = boxWidth / 2;
    const [yMin, yQ1, yMed, yQ3, yMax] =
      [row.re_min, row.re_q1, row.re_median, row.re_q3, row.re_max].map(y);
    parts.push(`<g class="box" data-quantile="${row.quantile}">`);
    parts.push(`<line x1="${fmt(cx)}" y1="${fmt(yMin)}" x2="${fmt(cx)}" y2="${fmt(yQ1)}" stroke="black"/>`);
    parts.push(`<line x1="${fmt(cx)}" y1="${fmt(yQ3)}" x2="${fmt(cx)}" y2="${fmt(yMax)}" stroke="black"/>`);
    parts.push(`<line x1="${fmt(cx - half)}" y1="${fmt(yMin)}" x2="${fmt(cx + half)}" y2="${fmt(yMin)}" stroke="black"/>`);
    parts.push(`<line x1="${fmt(cx - half)}" y1="${fmt(yMax)}" x2="${fmt(cx + half)}" y2="${fmt(yMax)}" stroke="black"/>`);
    parts.push(`<rect x="${fmt(cx - half)}" y="${fmt(yQ3)}" width="${fmt(boxWidth)}" height="${fmt(yQ1 - yQ3)}" fill="#9ecae1" stroke="black"/>`);
    parts.push(`<line class="median" x1="${fmt(cx - half)}" y1="${fmt(yMed)}" x2="${fmt(cx + half)}" y2="${fmt(yMed)}" stroke="black" stroke-width="2"/>`);
    parts.push(`</g>`);
    parts.push(`<text x="${fmt(cx)}" y="${axisY + 16}" text-anchor="middle" font-size="10">${row.quantile}</text>`);
  });
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

function applyTemplate(template: string, round: number, source: string): string {
  return template.replace("{round}", String(round)).replace("{source}", source);
}

/** Render every (csv, round) panel to `<out>/<stem>-round-<r>.svg`. */
export function renderConvergence(spec: FigureSpec): string[] {
  if (spec.rounds.length === 0) {
    throw new Error("no rounds requested");
  }
  fs.mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const csvPath of spec.csvPaths) {
    const rows = readTrace(csvPath);
    const stem = path.basename(csvPath).replace(/\.csv$/i, "");
    for (const round of spec.rounds) {
      const title = applyTemplate(spec.titleTemplate ?? "{source} — round {round}",
                                  round, stem);
      const svg = renderPanel(rows, round, title, spec.logY ?? false);
      const outPath = path.join(spec.outDir, `${stem}-round-${round}.svg`);
      fs.writeFileSync(outPath, svg);
      written.push(outPath);
    }
  }
  return written;
}
