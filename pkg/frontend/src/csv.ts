import { readFileSync } from "node:fs";
import Papa from "papaparse";

/**
 * Parsers for the CSV files written by the solver's `export` command.
 *
 * Each file starts with one or more `#`-prefixed comment lines (the first
 * holds a JSON metadata blob describing the run), followed by a header row
 * and numeric data rows.  These scripts never recompute any mathematics:
 * everything rendered comes verbatim from the CSV content.
 */

export type PlotKind = "radial-profile" | "polar-surface" | "decay";

export interface RadialProfile {
  kind: "radial-profile";
  meta: Record<string, unknown>;
  /** name of the abscissa column ("r" or "x") */
  abscissa: string;
  r: number[];
  u: number[];
}

export interface PolarSurface {
  kind: "polar-surface";
  meta: Record<string, unknown>;
  r: number[];
  theta: number[];
  u: number[];
}

export interface ModeTable {
  kind: "decay";
  meta: Record<string, unknown>;
  mode: number[];
  eigenvalue: number[];
  coefficient: number[];
}

export class SchemaError extends Error {}

interface RawCsv {
  meta: Record<string, unknown>;
  header: string[];
  rows: number[][];
}

function parseRaw(path: string): RawCsv {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/);
  let meta: Record<string, unknown> = {};
  let i = 0;
  let sawMeta = false;
  while (i < lines.length && lines[i]!.startsWith("#")) {
    const body = lines[i]!.replace(/^#\s*/, "");
    if (!sawMeta && body.startsWith("{")) {
      try {
        meta = JSON.parse(body) as Record<string, unknown>;
        sawMeta = true;
      } catch {
        throw new SchemaError(`${path}: malformed metadata comment`);
      }
    }
    i += 1;
  }
  const csvBody = lines.slice(i).join("\n");
  const parsed = Papa.parse<string[]>(csvBody.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0]!.message}`);
  }
  const data = parsed.data;
  if (data.length < 2) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const header = data[0]!.map((h) => h.trim());
  const rows = data.slice(1).map((row, k) => {
    if (row.length !== header.length) {
      throw new SchemaError(`${path}: row ${k + 1} has ${row.length} fields, expected ${header.length}`);
    }
    return row.map((cell) => {
      const v = Number(cell);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${path}: non-numeric value "${cell}" in row ${k + 1}`);
      }
      return v;
    });
  });
  return { meta, header, rows };
}

function expectHeader(path: string, got: string[], want: string[][]): string[] {
  for (const candidate of want) {
    if (candidate.length === got.length && candidate.every((h, k) => h === got[k])) {
      return candidate;
    }
  }
  throw new SchemaError(
    `${path}: header [${got.join(",")}] does not match expected [${want.map((w) => w.join(",")).join(" | ")}]`,
  );
}

export function readRadialProfile(path: string): RadialProfile {
  const { meta, header, rows } = parseRaw(path);
  const matched = expectHeader(path, header, [["r", "u"], ["x", "u"]]);
  return {
    kind: "radial-profile",
    meta,
    abscissa: matched[0]!,
    r: rows.map((row) => row[0]!),
    u: rows.map((row) => row[1]!),
  };
}

export function readPolarSurface(path: string): PolarSurface {
  const { meta, header, rows } = parseRaw(path);
  expectHeader(path, header, [["r", "theta", "u"]]);
  return {
    kind: "polar-surface",
    meta,
    r: rows.map((row) => row[0]!),
    theta: rows.map((row) => row[1]!),
    u: rows.map((row) => row[2]!),
  };
}

export function readModeTable(path: string): ModeTable {
  const { meta, header, rows } = parseRaw(path);
  expectHeader(path, header, [["mode", "eigenvalue", "coefficient"]]);
  return {
    kind: "decay",
    meta,
    mode: rows.map((row) => row[0]!),
    eigenvalue: rows.map((row) => row[1]!),
    coefficient: rows.map((row) => row[2]!),
  };
}
