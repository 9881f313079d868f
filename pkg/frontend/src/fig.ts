/**
 * Figure descriptions and the one entry point that turns a CSV artifact
 * into an SVG file on disk.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseConvergence, parseMetric, SchemaError } from "./csv.js";
import { renderConvergence } from "./convergence.js";
import { renderHeatmap } from "./heatmap.js";

export type FigureKind = "convergence" | "heatmap";

export interface FigureSpec {
  /** Path of the CSV artifact produced by the laboratory CLI. */
  input: string;
  kind: FigureKind;
  /** Path the SVG is written to. */
  output: string;
  title?: string;
}

export interface FigureResult {
  output: string;
  /** Renderer-side slope fits for convergence figures, absent for heatmaps. */
  fittedSlopes?: Record<string, number | null>;
}

export function renderFigure(spec: FigureSpec): { svg: string; result: FigureResult } {
  const text = readFileSync(spec.input, "utf8");
  if (spec.kind === "convergence") {
    const table = parseConvergence(text);
    const fig = renderConvergence(table, spec.title ?? "residual decay across levels");
    return {
      svg: fig.svg,
      result: { output: spec.output, fittedSlopes: fig.fittedSlopes },
    };
  }
  if (spec.kind === "heatmap") {
    const table = parseMetric(text);
    const fig = renderHeatmap(table, spec.title ?? "reconstructed metric over the sphere");
    return { svg: fig.svg, result: { output: spec.output } };
  }
  throw new SchemaError(`unknown figure kind ${JSON.stringify(spec.kind)}`);
}

export function runFigure(spec: FigureSpec): FigureResult {
  const { svg, result } = renderFigure(spec);
  writeFileSync(spec.output, svg + "\n", "utf8");
  return result;
}
