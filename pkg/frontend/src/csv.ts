import { readFileSync } from "fs";
import Papa from "papaparse";
import { FigureKind, REQUIRED_HEADERS } from "./types.js";

export type Row = Record<string, string>;

export class SchemaError extends Error {}

export interface Table {
  path: string;
  rows: Row[];
}

export function loadTable(path: string, kind: FigureKind): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read input CSV ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<Row>(text.trim(), { header: true, skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV (${first.message} at row ${first.row})`);
  }
  const header = parsed.meta.fields ?? [];
  const required = REQUIRED_HEADERS[kind];
  const missing = required.filter((col) => !header.includes(col));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: header [${header.join(",")}] does not match figure kind '${kind}' ` +
        `(missing ${missing.join(", ")})`,
    );
  }
  return { path, rows: parsed.data };
}

export function num(row: Row, col: string, path: string): number {
  const value = Number(row[col]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`${path}: non-numeric value '${row[col]}' in column '${col}'`);
  }
  return value;
}
