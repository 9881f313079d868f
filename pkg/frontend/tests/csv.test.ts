import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  CONVERGENCE_HEADER,
  METRIC_HEADER,
  SchemaError,
  minEigSym2,
  parseConvergence,
  parseMetric,
} from "../src/index.js";

const FIXTURES = join(__dirname, "fixtures");

const convergenceText = readFileSync(join(FIXTURES, "convergence.csv"), "utf8");
const metricText = readFileSync(join(FIXTURES, "metric_standard.csv"), "utf8");

describe("parseConvergence", () => {
  it("reads levels, residual columns and reported slopes", () => {
    const table = parseConvergence(convergenceText);
    expect(table.rows).toHaveLength(3);
    expect(table.rows.map((r) => r.k)).toEqual([8, 16, 32]);
    expect(table.rows[0]!.hbar).toBeCloseTo(1 / 8, 15);
    expect(table.rows[2]!.residuals.r3_product).toBeGreaterThan(0);
    expect(table.reportedSlopes.r3_product).toBeCloseTo(1.772, 3);
    expect(table.reportedSlopes.r4_trace).toBeNull();
  });

  it("residuals shrink as the level grows", () => {
    const table = parseConvergence(convergenceText);
    const r1 = table.rows.map((r) => r.residuals.r1_norm);
    expect(r1[1]!).toBeLessThan(r1[0]!);
    expect(r1[2]!).toBeLessThan(r1[1]!);
  });

  it("rejects an empty file", () => {
    expect(() => parseConvergence("")).toThrow(SchemaError);
    expect(() => parseConvergence("\n\n")).toThrow(/empty/);
  });

  it("rejects a foreign header", () => {
    const mangled = convergenceText.replace("r3_product", "r3_mystery");
    expect(() => parseConvergence(mangled)).toThrow(SchemaError);
    expect(() => parseConvergence(mangled)).toThrow(/header mismatch/);
  });

  it("rejects a row with a missing column", () => {
    const lines = convergenceText.trim().split("\n");
    const short = lines[1]!.split(",").slice(0, -1).join(",");
    const mangled = [lines[0], short].join("\n");
    expect(() => parseConvergence(mangled)).toThrow(/cells/);
  });

  it("rejects non-numeric residuals", () => {
    const mangled = [CONVERGENCE_HEADER, "8,0.125,a,b,c,d,e"].join("\n");
    expect(() => parseConvergence(mangled)).toThrow(/finite number/);
  });

  it("rejects a header with no data", () => {
    expect(() => parseConvergence(CONVERGENCE_HEADER + "\n")).toThrow(/no data rows/);
  });

  it("rejects a slope summary naming an unknown column", () => {
    const mangled = convergenceText + "# slope,r9_bogus,1.0\n";
    expect(() => parseConvergence(mangled)).toThrow(/unknown column/);
  });
});

describe("parseMetric", () => {
  it("reads the angular grid and all tensor entries", () => {
    const table = parseMetric(metricText);
    expect(table.rows).toHaveLength(325);
    for (const row of table.rows.slice(0, 10)) {
      expect(row.theta).toBeGreaterThan(0);
      expect(row.theta).toBeLessThan(Math.PI);
      expect(row.sqrt_detG).toBeGreaterThan(0);
    }
  });

  it("rejects a truncated header", () => {
    const mangled = metricText.replace(",sqrt_detG", "");
    expect(() => parseMetric(mangled)).toThrow(SchemaError);
  });

  it("rejects a row with the wrong arity", () => {
    const mangled = [METRIC_HEADER, "0.5,0.5,1,0,1"].join("\n");
    expect(() => parseMetric(mangled)).toThrow(/cells/);
  });

  it("rejects an empty body", () => {
    expect(() => parseMetric(METRIC_HEADER + "\n")).toThrow(/no data rows/);
  });
});

describe("minEigSym2", () => {
  it("matches hand-computed eigenvalues", () => {
    // [[2, 1], [1, 2]] has eigenvalues 1 and 3
    expect(minEigSym2(2, 1, 2)).toBeCloseTo(1, 12);
    // diagonal case
    expect(minEigSym2(5, 0, -3)).toBeCloseTo(-3, 12);
    // rank-one [[1, 1], [1, 1]]
    expect(minEigSym2(1, 1, 1)).toBeCloseTo(0, 12);
  });
});
