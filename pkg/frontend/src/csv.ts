/**
 * Parsers for the two CSV artifacts the quantization laboratory emits.
 *
 * Both formats are plain comma-separated text with a fixed header row.
 * The convergence file additionally carries summary lines of the form
 * `# slope,<column>,<value|none>` after the data block. Anything that
 * deviates from the declared layout raises SchemaError; downstream
 * rendering never guesses at malformed input.
 */

/** Input does not match the declared CSV layout. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

/** Input parses but cannot support the requested figure. */
export class FigureError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FigureError";
  }
}

export const RESIDUAL_COLUMNS = [
  "r1_norm",
  "r2_bracket",
  "r3_product",
  "r4_trace",
  "r5_berezin",
] as const;

export type ResidualName = (typeof RESIDUAL_COLUMNS)[number];

export const CONVERGENCE_HEADER = `k,hbar,${RESIDUAL_COLUMNS.join(",")}`;

export interface ConvergenceRow {
  k: number;
  hbar: number;
  residuals: Record<ResidualName, number>;
}

export interface ConvergenceTable {
  rows: ConvergenceRow[];
  /** Fitted slopes reported by the producer; null when the producer printed `none`. */
  reportedSlopes: Partial<Record<ResidualName, number | null>>;
}

export const METRIC_HEADER =
  "theta,phi,G11,G12,G22,J11,J12,J21,J22,rho11,rho12,rho22,sqrt_detG";

const METRIC_COLUMNS = METRIC_HEADER.split(",");

export interface MetricRow {
  theta: number;
  phi: number;
  G11: number;
  G12: number;
  G22: number;
  J11: number;
  J12: number;
  J21: number;
  J22: number;
  rho11: number;
  rho12: number;
  rho22: number;
  sqrt_detG: number;
}

export interface MetricTable {
  rows: MetricRow[];
}

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

function parseNumber(cell: string, where: string): number {
  const value = Number(cell);
  if (cell === "" || !Number.isFinite(value)) {
    throw new SchemaError(`${where}: expected a finite number, got ${JSON.stringify(cell)}`);
  }
  return value;
}

export function parseConvergence(text: string): ConvergenceTable {
  const lines = splitLines(text);
  if (lines.length === 0) {
    throw new SchemaError("convergence table is empty");
  }
  if (lines[0] !== CONVERGENCE_HEADER) {
    throw new SchemaError(
      `convergence header mismatch: expected ${JSON.stringify(CONVERGENCE_HEADER)}, got ${JSON.stringify(lines[0])}`,
    );
  }

  const rows: ConvergenceRow[] = [];
  const reportedSlopes: Partial<Record<ResidualName, number | null>> = {};

  for (const line of lines.slice(1)) {
    if (line.startsWith("#")) {
      const parts = line.slice(1).trim().split(",");
      if (parts.length !== 3 || parts[0] !== "slope") {
        throw new SchemaError(`unrecognized summary line: ${JSON.stringify(line)}`);
      }
      const name = parts[1] as ResidualName;
      if (!RESIDUAL_COLUMNS.includes(name)) {
        throw new SchemaError(`slope summary names unknown column ${JSON.stringify(parts[1])}`);
      }
      reportedSlopes[name] =
        parts[2] === "none" ? null : parseNumber(parts[2]!, `slope summary for ${name}`);
      continue;
    }

    const cells = line.split(",");
    if (cells.length !== 2 + RESIDUAL_COLUMNS.length) {
      throw new SchemaError(
        `convergence row has ${cells.length} cells, expected ${2 + RESIDUAL_COLUMNS.length}: ${JSON.stringify(line)}`,
      );
    }
    const k = parseNumber(cells[0]!, "column k");
    const hbar = parseNumber(cells[1]!, "column hbar");
    if (k <= 0 || hbar <= 0) {
      throw new SchemaError(`level row must have positive k and hbar, got k=${k}, hbar=${hbar}`);
    }
    const residuals = {} as Record<ResidualName, number>;
    RESIDUAL_COLUMNS.forEach((name, i) => {
      residuals[name] = parseNumber(cells[2 + i]!, `column ${name}`);
    });
    rows.push({ k, hbar, residuals });
  }

  if (rows.length === 0) {
    throw new SchemaError("convergence table has a header but no data rows");
  }
  return { rows, reportedSlopes };
}

export function parseMetric(text: string): MetricTable {
  const lines = splitLines(text);
  if (lines.length === 0) {
    throw new SchemaError("metric table is empty");
  }
  if (lines[0] !== METRIC_HEADER) {
    throw new SchemaError(
      `metric header mismatch: expected ${JSON.stringify(METRIC_HEADER)}, got ${JSON.stringify(lines[0])}`,
    );
  }

  const rows: MetricRow[] = [];
  for (const line of lines.slice(1)) {
    if (line.startsWith("#")) {
      continue;
    }
    const cells = line.split(",");
    if (cells.length !== METRIC_COLUMNS.length) {
      throw new SchemaError(
        `metric row has ${cells.length} cells, expected ${METRIC_COLUMNS.length}: ${JSON.stringify(line)}`,
      );
    }
    const row = {} as Record<string, number>;
    METRIC_COLUMNS.forEach((name, i) => {
      row[name] = parseNumber(cells[i]!, `column ${name}`);
    });
    rows.push(row as unknown as MetricRow);
  }

  if (rows.length === 0) {
    throw new SchemaError("metric table has a header but no data rows");
  }
  return { rows };
}

/**
 * Smaller eigenvalue of the symmetric 2x2 block [[a, b], [b, c]].
 * Used to color the excess panel; the excess block is positive
 * semidefinite wherever the conformal density reaches one.
 */
export function minEigSym2(a: number, b: number, c: number): number {
  const mean = (a + c) / 2;
  const radius = Math.sqrt(((a - c) / 2) ** 2 + b * b);
  return mean - radius;
}
