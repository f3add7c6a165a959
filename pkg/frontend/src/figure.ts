/** SVG learning-curve figures: one panel per CSV, a mean line with a
 * standard-error band per plotted seat, and a dotted horizontal reference
 * line (the exact defensive value the curves must stay above). */

import { ResultRow, SchemaError } from "./csv.js";
import { summarize } from "./summary.js";

export interface CurveData {
  label: string;
  mean: number[];
  stderr: number[];
  color: string;
}

export interface PanelSpec {
  title: string;
  curves: CurveData[];
  reference?: number;
}

export interface PanelOptions {
  title: string;
  seats?: number[];
  algos?: string[];
  window?: number;
  reference?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function buildPanel(rows: ResultRow[], options: PanelOptions): PanelSpec {
  let filtered = rows;
  if (options.seats !== undefined) {
    const keep = new Set(options.seats);
    filtered = filtered.filter((r) => keep.has(r.seat));
  }
  if (options.algos !== undefined) {
    const keep = new Set(options.algos);
    filtered = filtered.filter((r) => keep.has(r.algo));
  }
  if (filtered.length === 0) {
    throw new SchemaError("seat/algo filter matched no rows");
  }
  const summaries = summarize(filtered, options.window ?? 1);
  const algoBySeat = new Map<number, string>();
  for (const row of filtered) algoBySeat.set(row.seat, row.algo);
  const curves: CurveData[] = [];
  let c = 0;
  for (const [seat, summary] of summaries) {
    curves.push({
      label: `seat ${seat} (${algoBySeat.get(seat)})`,
      mean: summary.mean,
      stderr: summary.stderr,
      color: PALETTE[c++ % PALETTE.length],
    });
  }
  return { title: options.title, curves, reference: options.reference };
}

interface Scale {
  (value: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo || 1;
  const rawStep = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? candidates[3];
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

const PANEL_W = 420;
const PANEL_H = 300;
const MARGIN = { top: 34, right: 16, bottom: 40, left: 56 };

function fmt(v: number): string {
  return Number(v.toFixed(6)).toString();
}

function renderPanel(panel: PanelSpec, ox: number): string {
  const stages = Math.max(...panel.curves.map((c) => c.mean.length));
  let lo = Infinity;
  let hi = -Infinity;
  for (const curve of panel.curves) {
    for (let t = 0; t < curve.mean.length; t++) {
      lo = Math.min(lo, curve.mean[t] - curve.stderr[t]);
      hi = Math.max(hi, curve.mean[t] + curve.stderr[t]);
    }
  }
  if (panel.reference !== undefined) {
    lo = Math.min(lo, panel.reference);
    hi = Math.max(hi, panel.reference);
  }
  const pad = (hi - lo || 1) * 0.06;
  lo -= pad;
  hi += pad;

  const x = linearScale(0, stages - 1 || 1, ox + MARGIN.left, ox + PANEL_W - MARGIN.right);
  const y = linearScale(lo, hi, PANEL_H - MARGIN.bottom, MARGIN.top);
  const parts: string[] = [];
  parts.push(`<g class="panel">`);
  parts.push(
    `<text x="${ox + PANEL_W / 2}" y="20" text-anchor="middle" ` +
      `font-size="14" font-weight="bold">${escapeXml(panel.title)}</text>`,
  );

  // axes
  const x0 = ox + MARGIN.left;
  const x1 = ox + PANEL_W - MARGIN.right;
  const yAxis = PANEL_H - MARGIN.bottom;
  parts.push(`<line x1="${x0}" y1="${yAxis}" x2="${x1}" y2="${yAxis}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${yAxis}" stroke="black"/>`);
  for (const t of niceTicks(0, stages - 1 || 1)) {
    parts.push(
      `<line x1="${fmt(x(t))}" y1="${yAxis}" x2="${fmt(x(t))}" y2="${yAxis + 4}" stroke="black"/>` +
        `<text x="${fmt(x(t))}" y="${yAxis + 16}" text-anchor="middle" font-size="10">${fmt(t)}</text>`,
    );
  }
  for (const v of niceTicks(lo, hi)) {
    parts.push(
      `<line x1="${x0 - 4}" y1="${fmt(y(v))}" x2="${x0}" y2="${fmt(y(v))}" stroke="black"/>` +
        `<text x="${x0 - 7}" y="${fmt(y(v) + 3)}" text-anchor="end" font-size="10">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<text x="${ox + PANEL_W / 2}" y="${PANEL_H - 6}" text-anchor="middle" ` +
      `font-size="11">stage</text>`,
  );

  // error bands first so mean lines draw on top
  for (const curve of panel.curves) {
    if (curve.stderr.some((e) => e > 0)) {
      const upper = curve.mean.map((m, t) => `${fmt(x(t))},${fmt(y(m + curve.stderr[t]))}`);
      const lower = curve.mean
        .map((m, t) => `${fmt(x(t))},${fmt(y(m - curve.stderr[t]))}`)
        .reverse();
      parts.push(
        `<polygon class="band" points="${upper.concat(lower).join(" ")}" ` +
          `fill="${curve.color}" fill-opacity="0.18" stroke="none"/>`,
      );
    }
  }
  for (const curve of panel.curves) {
    const points = curve.mean.map((m, t) => `${fmt(x(t))},${fmt(y(m))}`).join(" ");
    parts.push(
      `<polyline class="mean" points="${points}" fill="none" ` +
        `stroke="${curve.color}" stroke-width="1.5"/>`,
    );
  }
  if (panel.reference !== undefined) {
    parts.push(
      `<line class="reference" x1="${x0}" y1="${fmt(y(panel.reference))}" ` +
        `x2="${x1}" y2="${fmt(y(panel.reference))}" stroke="black" ` +
        `stroke-dasharray="3,3"/>`,
    );
  }
  panel.curves.forEach((curve, i) => {
    const ly = MARGIN.top + 12 + 14 * i;
    parts.push(
      `<line x1="${x1 - 110}" y1="${ly - 4}" x2="${x1 - 92}" y2="${ly - 4}" ` +
        `stroke="${curve.color}" stroke-width="2"/>` +
        `<text x="${x1 - 88}" y="${ly}" font-size="10">${escapeXml(curve.label)}</text>`,
    );
  });
  parts.push(`</g>`);
  return parts.join("\n");
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderFigure(panels: PanelSpec[]): string {
  if (panels.length === 0) throw new SchemaError("no panels to render");
  const width = PANEL_W * panels.length;
  const body = panels.map((panel, i) => renderPanel(panel, i * PANEL_W)).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${PANEL_H}" viewBox="0 0 ${width} ${PANEL_H}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${PANEL_H}" fill="white"/>\n` +
    `${body}\n</svg>\n`
  );
}
