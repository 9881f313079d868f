/**
 * Log-log residual-decay figure. One curve per correspondence-principle
 * residual, drawn against the semiclassical parameter, with a slope fitted
 * here (not copied from the producer's summary lines) annotated per curve.
 */

import {
  ConvergenceTable,
  FigureError,
  RESIDUAL_COLUMNS,
  ResidualName,
} from "./csv.js";
import { SvgDoc } from "./svg.js";

/** Residuals at or below this are treated as numerical floor, not signal. */
export const SLOPE_FLOOR = 1e-12;

const CURVE_COLORS: Record<ResidualName, string> = {
  r1_norm: "#1f77b4",
  r2_bracket: "#d62728",
  r3_product: "#2ca02c",
  r4_trace: "#9467bd",
  r5_berezin: "#ff7f0e",
};

const CURVE_LABELS: Record<ResidualName, string> = {
  r1_norm: "operator norm gap",
  r2_bracket: "bracket mismatch",
  r3_product: "product mismatch",
  r4_trace: "trace rule",
  r5_berezin: "downward round trip",
};

/**
 * Least-squares slope of log(residual) against log(hbar), using only
 * points above the numerical floor. Returns null when fewer than two
 * usable points remain.
 */
export function fitSlope(points: Array<[number, number]>, floor = SLOPE_FLOOR): number | null {
  const usable = points.filter(([, r]) => r > floor);
  if (usable.length < 2) {
    return null;
  }
  const xs = usable.map(([h]) => Math.log(h));
  const ys = usable.map(([, r]) => Math.log(r));
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < n; i++) {
    sxy += (xs[i]! - mx) * (ys[i]! - my);
    sxx += (xs[i]! - mx) ** 2;
  }
  if (sxx === 0) {
    return null;
  }
  return sxy / sxx;
}

export interface ConvergenceFigure {
  svg: string;
  /** Slopes fitted by this renderer, keyed by residual column. */
  fittedSlopes: Record<ResidualName, number | null>;
}

export function renderConvergence(table: ConvergenceTable, title: string): ConvergenceFigure {
  if (table.rows.length < 2) {
    throw new FigureError(
      `need at least two levels to draw a decay figure, got ${table.rows.length}`,
    );
  }

  const rows = [...table.rows].sort((a, b) => a.hbar - b.hbar);

  const fittedSlopes = {} as Record<ResidualName, number | null>;
  const curvePoints = {} as Record<ResidualName, Array<[number, number]>>;
  for (const name of RESIDUAL_COLUMNS) {
    const points = rows.map((row) => [row.hbar, row.residuals[name]] as [number, number]);
    curvePoints[name] = points.filter(([, r]) => r > SLOPE_FLOOR);
    fittedSlopes[name] = fitSlope(points);
  }

  const visible = RESIDUAL_COLUMNS.filter((name) => curvePoints[name].length > 0);
  if (visible.length === 0) {
    throw new FigureError("every residual sits at the numerical floor; nothing to draw");
  }

  const width = 680;
  const height = 440;
  const plot = { left: 80, top: 48, right: width - 210, bottom: height - 58 };

  const allH = rows.map((r) => r.hbar);
  const allR = visible.flatMap((name) => curvePoints[name].map(([, r]) => r));
  const xMin = Math.log10(Math.min(...allH));
  const xMax = Math.log10(Math.max(...allH));
  const yMin = Math.log10(Math.min(...allR));
  const yMax = Math.log10(Math.max(...allR));
  const padY = Math.max(0.25, (yMax - yMin) * 0.05);
  const xSpan = Math.max(xMax - xMin, 1e-9);
  const ySpan = yMax - yMin + 2 * padY;

  const xPix = (h: number) =>
    plot.left + ((Math.log10(h) - xMin) / xSpan) * (plot.right - plot.left);
  const yPix = (r: number) =>
    plot.bottom - ((Math.log10(r) - (yMin - padY)) / ySpan) * (plot.bottom - plot.top);

  const doc = new SvgDoc(width, height);
  doc.text(width / 2, 24, title, { size: 15, anchor: "middle" });

  // frame
  doc.line(plot.left, plot.top, plot.left, plot.bottom, "#444444");
  doc.line(plot.left, plot.bottom, plot.right, plot.bottom, "#444444");

  // decade ticks
  for (let e = Math.ceil(yMin - padY); e <= Math.floor(yMax + padY); e++) {
    const y = yPix(10 ** e);
    doc.line(plot.left - 4, y, plot.left, y, "#444444");
    doc.line(plot.left, y, plot.right, y, "#eeeeee");
    doc.text(plot.left - 8, y + 4, `1e${e}`, { anchor: "end", size: 10 });
  }
  for (const row of rows) {
    const x = xPix(row.hbar);
    doc.line(x, plot.bottom, x, plot.bottom + 4, "#444444");
    doc.text(x, plot.bottom + 18, `1/${row.k}`, { anchor: "middle", size: 10 });
  }
  doc.text((plot.left + plot.right) / 2, height - 16, "semiclassical parameter", {
    anchor: "middle",
    size: 12,
  });
  doc.text(22, (plot.top + plot.bottom) / 2, "residual", {
    anchor: "middle",
    size: 12,
    rotate: -90,
  });

  // curves
  for (const name of RESIDUAL_COLUMNS) {
    const points = curvePoints[name];
    if (points.length === 0) {
      continue;
    }
    const color = CURVE_COLORS[name];
    const pix = points.map(([h, r]) => [xPix(h), yPix(r)] as [number, number]);
    if (pix.length > 1) {
      doc.polyline(pix, color);
    }
    for (const [x, y] of pix) {
      doc.circle(x, y, 3, color);
    }
  }

  // legend with fitted slope annotations
  let legendY = plot.top + 8;
  for (const name of RESIDUAL_COLUMNS) {
    const color = CURVE_COLORS[name];
    doc.line(plot.right + 16, legendY - 4, plot.right + 36, legendY - 4, color, 2.5);
    doc.text(plot.right + 42, legendY, CURVE_LABELS[name], { size: 10.5 });
    const slope = fittedSlopes[name];
    const note = slope === null ? "at floor, no slope" : `slope ${slope.toFixed(3)}`;
    doc.text(plot.right + 42, legendY + 13, note, { size: 10, fill: "#666666" });
    legendY += 34;
  }

  return { svg: doc.render(), fittedSlopes };
}
