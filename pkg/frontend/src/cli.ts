/**
 * Command line wrapper: one figure per invocation.
 *
 *   fuzzysphere-figures --kind convergence --input convergence.csv --output decay.svg
 *   fuzzysphere-figures --spec figure.json
 *
 * A JSON spec file carries the same fields as the flags; explicit flags
 * win over the spec file. Exit 0 on success, 2 on usage or input errors.
 */

import { parseArgs } from "node:util";
import { readFileSync } from "node:fs";

import { FigureError, SchemaError } from "./csv.js";
import { FigureKind, FigureSpec, runFigure } from "./fig.js";

const USAGE = `usage: fuzzysphere-figures [--spec FILE.json] --kind convergence|heatmap --input TABLE.csv --output FIGURE.svg [--title TEXT]`;

function loadSpecFile(path: string): Partial<FigureSpec> {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(`spec file ${path} is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SchemaError(`spec file ${path} must hold a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  const spec: Partial<FigureSpec> = {};
  for (const key of ["input", "kind", "output", "title"] as const) {
    const value = obj[key];
    if (value === undefined) {
      continue;
    }
    if (typeof value !== "string") {
      throw new SchemaError(`spec field ${key} must be a string`);
    }
    (spec as Record<string, string>)[key] = value;
  }
  const unknown = Object.keys(obj).filter((k) => !["input", "kind", "output", "title"].includes(k));
  if (unknown.length > 0) {
    throw new SchemaError(`spec file has unknown fields: ${unknown.join(", ")}`);
  }
  return spec;
}

export interface CliIo {
  out: (line: string) => void;
  err: (line: string) => void;
}

export function runCli(argv: string[], io: CliIo): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        spec: { type: "string" },
        kind: { type: "string", short: "k" },
        input: { type: "string", short: "i" },
        output: { type: "string", short: "o" },
        title: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
      allowPositionals: false,
    });
  } catch (err) {
    io.err(`${(err as Error).message}`);
    io.err(USAGE);
    return 2;
  }

  if (parsed.values.help) {
    io.out(USAGE);
    return 0;
  }

  try {
    const fromFile = parsed.values.spec ? loadSpecFile(parsed.values.spec) : {};
    const kind = parsed.values.kind ?? fromFile.kind;
    const input = parsed.values.input ?? fromFile.input;
    const output = parsed.values.output ?? fromFile.output;
    const title = parsed.values.title ?? fromFile.title;

    if (!kind || !input || !output) {
      io.err("missing required fields: kind, input and output must each be set");
      io.err(USAGE);
      return 2;
    }
    if (kind !== "convergence" && kind !== "heatmap") {
      io.err(`unknown kind ${JSON.stringify(kind)}; expected convergence or heatmap`);
      return 2;
    }

    const spec: FigureSpec = { input, kind: kind as FigureKind, output };
    if (title !== undefined) {
      spec.title = title;
    }
    const result = runFigure(spec);
    io.out(`wrote ${result.output}`);
    if (result.fittedSlopes) {
      for (const [name, slope] of Object.entries(result.fittedSlopes)) {
        io.out(`  fitted slope ${name}: ${slope === null ? "none" : slope.toFixed(6)}`);
      }
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof FigureError) {
      io.err(`${err.name}: ${err.message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      io.err(`cannot read input: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}
