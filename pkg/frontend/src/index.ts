export {
  SchemaError,
  FigureError,
  parseConvergence,
  parseMetric,
  minEigSym2,
  RESIDUAL_COLUMNS,
  CONVERGENCE_HEADER,
  METRIC_HEADER,
} from "./csv.js";
export type { ConvergenceTable, ConvergenceRow, MetricTable, MetricRow, ResidualName } from "./csv.js";
export { fitSlope, renderConvergence, SLOPE_FLOOR } from "./convergence.js";
export type { ConvergenceFigure } from "./convergence.js";
export { metricGrid, renderHeatmap } from "./heatmap.js";
export type { MetricGrid, HeatmapFigure } from "./heatmap.js";
export { renderFigure, runFigure } from "./fig.js";
export type { FigureSpec, FigureKind, FigureResult } from "./fig.js";
export { runCli } from "./cli.js";
export type { CliIo } from "./cli.js";
