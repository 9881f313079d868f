/**
 * Two-panel angular heatmap of a reconstructed metric table: the
 * conformal density sqrt(det G) and the smallest eigenvalue of the
 * excess block rho = G - G/sqrt(det G), the part of the metric beyond
 * the minimal compatible one. rho is positive semidefinite exactly when
 * the density is >= 1, so panel two visualizes where the lower bound
 * saturates. Rows must tile a full product grid in (theta, phi); the
 * renderer rebuilds the axes from the distinct values rather than
 * assuming any particular resolution.
 */

import { MetricTable, MetricRow, SchemaError, minEigSym2 } from "./csv.js";
import { SvgDoc, rampColor, fmt } from "./svg.js";

export interface MetricGrid {
  thetas: number[];
  phis: number[];
  /** [iTheta][iPhi] */
  sqrtDet: number[][];
  minEig: number[][];
}

function uniqueSorted(values: number[]): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out.sort((a, b) => a - b);
}

export function metricGrid(table: MetricTable): MetricGrid {
  const thetas = uniqueSorted(table.rows.map((r) => r.theta));
  const phis = uniqueSorted(table.rows.map((r) => r.phi));
  if (thetas.length < 2 || phis.length < 2) {
    throw new SchemaError(
      `metric table must sample both angles, got ${thetas.length} x ${phis.length}`,
    );
  }
  if (table.rows.length !== thetas.length * phis.length) {
    throw new SchemaError(
      `metric table is not a complete product grid: ${table.rows.length} rows for ${thetas.length} x ${phis.length} angles`,
    );
  }

  const tIndex = new Map(thetas.map((v, i) => [v, i]));
  const pIndex = new Map(phis.map((v, i) => [v, i]));
  const sqrtDet = thetas.map(() => new Array<number>(phis.length).fill(NaN));
  const minEig = thetas.map(() => new Array<number>(phis.length).fill(NaN));
  for (const row of table.rows) {
    const it = tIndex.get(row.theta)!;
    const ip = pIndex.get(row.phi)!;
    sqrtDet[it]![ip] = row.sqrt_detG;
    minEig[it]![ip] = minEigSym2(row.rho11, row.rho12, row.rho22);
  }
  for (const plane of [sqrtDet, minEig]) {
    for (const line of plane) {
      if (line.some((v) => Number.isNaN(v))) {
        throw new SchemaError("metric table repeats one grid node and omits another");
      }
    }
  }
  return { thetas, phis, sqrtDet, minEig };
}

interface PanelSpec {
  label: string;
  values: number[][];
}

function valueRange(values: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const line of values) {
    for (const v of line) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (hi - lo < 1e-12) {
    // flat field: widen the window so the ramp midpoint is used
    return [lo - 0.5, hi + 0.5];
  }
  return [lo, hi];
}

function edges(centers: number[], lo: number, hi: number): number[] {
  const out: number[] = [Math.max(lo, centers[0]! - (centers[1]! - centers[0]!) / 2)];
  for (let i = 0; i + 1 < centers.length; i++) {
    out.push((centers[i]! + centers[i + 1]!) / 2);
  }
  const n = centers.length;
  out.push(Math.min(hi, centers[n - 1]! + (centers[n - 1]! - centers[n - 2]!) / 2));
  return out;
}

export interface HeatmapFigure {
  svg: string;
  grid: MetricGrid;
}

export function renderHeatmap(table: MetricTable, title: string): HeatmapFigure {
  const grid = metricGrid(table);
  const panels: PanelSpec[] = [
    { label: "conformal density sqrt(det G)", values: grid.sqrtDet },
    { label: "unsharpness excess, smallest eigenvalue", values: grid.minEig },
  ];

  const panelW = 330;
  const panelH = 240;
  const barW = 14;
  const gap = 104;
  const left = 64;
  const top = 64;
  const width = left + panels.length * (panelW + gap) + 10;
  const height = top + panelH + 70;

  const doc = new SvgDoc(width, height);
  doc.text(width / 2, 28, title, { size: 15, anchor: "middle" });

  const thetaEdges = edges(grid.thetas, 0, Math.PI);
  const phiEdges = edges(grid.phis, 0, 2 * Math.PI);
  // wrap-around: pad the outer phi edges to cover the full circle
  phiEdges[0] = 0;
  phiEdges[phiEdges.length - 1] = 2 * Math.PI;

  panels.forEach((panel, p) => {
    const x0 = left + p * (panelW + gap);
    const y0 = top;
    const [vLo, vHi] = valueRange(panel.values);
    const xOf = (phi: number) => x0 + (phi / (2 * Math.PI)) * panelW;
    const yOf = (theta: number) => y0 + (theta / Math.PI) * panelH;

    doc.text(x0 + panelW / 2, y0 - 10, panel.label, { size: 12, anchor: "middle" });

    for (let it = 0; it < grid.thetas.length; it++) {
      for (let ip = 0; ip < grid.phis.length; ip++) {
        const v = panel.values[it]![ip]!;
        const t = (v - vLo) / (vHi - vLo);
        const xa = xOf(phiEdges[ip]!);
        const xb = xOf(phiEdges[ip + 1]!);
        const ya = yOf(thetaEdges[it]!);
        const yb = yOf(thetaEdges[it + 1]!);
        doc.rect(xa, ya, xb - xa, yb - ya, rampColor(t));
      }
    }

    // frame and angular ticks
    doc.raw(
      `<rect x="${fmt(x0)}" y="${fmt(y0)}" width="${fmt(panelW)}" height="${fmt(panelH)}" fill="none" stroke="#444444" stroke-width="1"/>`,
    );
    const phiTicks: Array<[number, string]> = [
      [0, "0"],
      [Math.PI, "pi"],
      [2 * Math.PI, "2pi"],
    ];
    for (const [phi, label] of phiTicks) {
      doc.line(xOf(phi), y0 + panelH, xOf(phi), y0 + panelH + 4, "#444444");
      doc.text(xOf(phi), y0 + panelH + 17, label, { anchor: "middle", size: 10 });
    }
    const thetaTicks: Array<[number, string]> = [
      [0, "0"],
      [Math.PI / 2, "pi/2"],
      [Math.PI, "pi"],
    ];
    for (const [theta, label] of thetaTicks) {
      doc.line(x0 - 4, yOf(theta), x0, yOf(theta), "#444444");
      doc.text(x0 - 8, yOf(theta) + 4, label, { anchor: "end", size: 10 });
    }
    doc.text(x0 + panelW / 2, y0 + panelH + 36, "azimuth", { anchor: "middle", size: 11 });
    doc.text(x0 - 46, y0 + panelH / 2, "colatitude", {
      anchor: "middle",
      size: 11,
      rotate: -90,
    });

    // colorbar
    const barX = x0 + panelW + 18;
    const steps = 24;
    for (let s = 0; s < steps; s++) {
      const frac = s / (steps - 1);
      const ya = y0 + panelH - ((s + 1) / steps) * panelH;
      doc.rect(barX, ya, barW, panelH / steps + 0.5, rampColor(frac));
    }
    doc.raw(
      `<rect x="${fmt(barX)}" y="${fmt(y0)}" width="${fmt(barW)}" height="${fmt(panelH)}" fill="none" stroke="#444444" stroke-width="0.8"/>`,
    );
    for (const frac of [0, 0.5, 1]) {
      const v = vLo + frac * (vHi - vLo);
      const y = y0 + panelH - frac * panelH;
      doc.text(barX + barW + 5, y + 4, v.toFixed(4), { size: 9.5 });
    }
  });

  return { svg: doc.render(), grid };
}
