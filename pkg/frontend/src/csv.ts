/**
 * Parser for the scan/timeseries CSVs emitted by the quenchmetric CLI:
 * `#key=value` metadata comment lines, a header row, then numeric rows
 * (17-significant-digit floats; `-inf`/`inf`/`nan` sentinels; 0/1 flags).
 */

import { readFileSync } from "node:fs";

export interface ParsedCsv {
  meta: Record<string, string>;
  header: string[];
  rows: number[][];
}

export class SchemaError extends Error {}

export const SCAN_COLUMNS = [
  "lambda_x",
  "lambda_y",
  "h",
  "t",
  "g_xx",
  "g_xy",
  "g_yy",
  "g_xh",
  "g_yh",
  "g_hh",
  "norm",
  "log10_norm",
  "near_critical",
  "gap_min",
  "gap_min_quench",
] as const;

export const TIMESERIES_COLUMNS = [
  "t",
  "q1",
  "q",
  "asymptote",
  "X",
  "X_bound",
  "triangle_lo",
  "triangle_hi",
  "otoc_rhs",
] as const;

function parseNumber(text: string): number {
  switch (text) {
    case "inf":
      return Infinity;
    case "-inf":
      return -Infinity;
    case "nan":
    case "-nan":
      return NaN;
  }
  const value = Number(text);
  if (Number.isNaN(value) && text !== "nan") {
    throw new SchemaError(`not a number: ${JSON.stringify(text)}`);
  }
  return value;
}

export function parseCsvText(text: string): ParsedCsv {
  const meta: Record<string, string> = {};
  const lines = text.split("\n");
  let index = 0;
  for (; index < lines.length && lines[index].startsWith("#"); index++) {
    const body = lines[index].slice(1);
    const eq = body.indexOf("=");
    if (eq > 0) meta[body.slice(0, eq)] = body.slice(eq + 1);
  }
  if (index >= lines.length || lines[index].trim() === "") {
    throw new SchemaError("missing header row");
  }
  const header = lines[index].split(",");
  index += 1;
  const rows: number[][] = [];
  for (; index < lines.length; index++) {
    const line = lines[index].trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `row ${rows.length + 1} has ${parts.length} fields, header has ${header.length}`,
      );
    }
    rows.push(parts.map(parseNumber));
  }
  return { meta, header, rows };
}

export function parseCsvFile(path: string): ParsedCsv {
  return parseCsvText(readFileSync(path, "utf-8"));
}

/** Index of a required column, or a SchemaError naming it. */
export function columnIndex(csv: ParsedCsv, name: string): number {
  const idx = csv.header.indexOf(name);
  if (idx < 0) throw new SchemaError(`missing required column: ${name}`);
  return idx;
}

export function isScanCsv(csv: ParsedCsv): boolean {
  return csv.header.includes("lambda_x") && csv.header.includes("log10_norm");
}

export function isTimeseriesCsv(csv: ParsedCsv): boolean {
  return csv.header[0] === "t" && csv.header.includes("q1");
}
