/**
 * Canvas geometry for the curve panel.
 *
 * Pure coordinate mapping only — the values being plotted always come from
 * the server, this module just turns them into pixel polylines.
 */

import type { CurveResponse } from "./api.js";

export interface Polyline {
  color: string;
  points: Array<[number, number]>;
}

export interface ChartLayout {
  width: number;
  height: number;
  margin: number;
  tMin: number;
  tMax: number;
  vMin: number;
  vMax: number;
}

export function layoutFor(
  curves: CurveResponse[],
  width: number,
  height: number,
  margin = 24,
): ChartLayout {
  let tMin = Infinity;
  let tMax = -Infinity;
  let vMin = Infinity;
  let vMax = -Infinity;
  for (const curve of curves) {
    for (const t of curve.times) {
      tMin = Math.min(tMin, t);
      tMax = Math.max(tMax, t);
    }
    for (const v of curve.values) {
      const comps = typeof v === "number" ? [v] : v;
      for (const c of comps) {
        vMin = Math.min(vMin, c);
        vMax = Math.max(vMax, c);
      }
    }
  }
  if (!isFinite(tMin)) {
    tMin = 0;
    tMax = 1;
  }
  if (tMax === tMin) tMax = tMin + 1;
  if (!isFinite(vMin) || vMin === vMax) {
    vMin = -1;
    vMax = 1;
  }
  // always keep the zero line in view
  vMin = Math.min(vMin, 0);
  vMax = Math.max(vMax, 0);
  return { width, height, margin, tMin, tMax, vMin, vMax };
}

export function toX(layout: ChartLayout, t: number): number {
  const inner = layout.width - 2 * layout.margin;
  return layout.margin + ((t - layout.tMin) / (layout.tMax - layout.tMin)) * inner;
}

export function toY(layout: ChartLayout, v: number): number {
  const inner = layout.height - 2 * layout.margin;
  return layout.height - layout.margin - ((v - layout.vMin) / (layout.vMax - layout.vMin)) * inner;
}

/** One polyline per vector component (or one for a scalar curve). */
export function toPolylines(
  layout: ChartLayout,
  curve: CurveResponse,
  colors: string[],
): Polyline[] {
  const arity = curve.values.length > 0 && typeof curve.values[0] !== "number" ? 3 : 1;
  const lines: Polyline[] = [];
  for (let c = 0; c < arity; c++) {
    const points: Array<[number, number]> = [];
    for (let i = 0; i < curve.times.length; i++) {
      const t = curve.times[i]!;
      const raw = curve.values[i]!;
      const v = typeof raw === "number" ? raw : raw[c]!;
      points.push([toX(layout, t), toY(layout, v)]);
    }
    lines.push({ color: colors[c] ?? "#000000", points });
  }
  return lines;
}
