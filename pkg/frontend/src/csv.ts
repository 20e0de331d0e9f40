/** CSV reading with schema-sidecar validation of the harness outputs. */

import * as fs from "node:fs";
import * as path from "node:path";

export type Row = Record<string, string>;

export class DataError extends Error {}

export function parseCsv(textContent: string): { columns: string[]; rows: Row[] } {
  const lines = textContent.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new DataError("empty CSV");
  const columns = splitLine(lines[0]);
  const rows: Row[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = splitLine(lines[i]);
    if (cells.length !== columns.length) {
      throw new DataError(`row ${i} has ${cells.length} cells, header has ${columns.length}`);
    }
    const row: Row = {};
    columns.forEach((c, j) => (row[c] = cells[j]));
    rows.push(row);
  }
  return { columns, rows };
}

function splitLine(line: string): string[] {
  // harness CSVs are unquoted; tolerate simple double-quoted cells anyway
  const out: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') quoted = false;
      else cur += ch;
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      out.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  out.push(cur);
  return out;
}

/** Load a harness CSV, checking existence and its .schema.json sidecar. */
export function loadTable(dataDir: string, relative: string): { columns: string[]; rows: Row[] } {
  const file = path.join(dataDir, relative);
  if (!fs.existsSync(file)) {
    throw new DataError(`missing input file: ${file}`);
  }
  const parsed = parseCsv(fs.readFileSync(file, "utf8"));
  const sidecar = file + ".schema.json";
  if (!fs.existsSync(sidecar)) {
    throw new DataError(`missing schema sidecar: ${sidecar}`);
  }
  const schema = JSON.parse(fs.readFileSync(sidecar, "utf8"));
  if (JSON.stringify(schema.columns) !== JSON.stringify(parsed.columns)) {
    throw new DataError(
      `${relative}: header [${parsed.columns}] does not match schema [${schema.columns}]`);
  }
  if (schema.rows !== parsed.rows.length) {
    throw new DataError(
      `${relative}: ${parsed.rows.length} rows, schema declares ${schema.rows}`);
  }
  if (parsed.rows.length === 0) {
    throw new DataError(`${relative}: no data rows`);
  }
  return parsed;
}

export function loadJson(dataDir: string, relative: string): unknown {
  const file = path.join(dataDir, relative);
  if (!fs.existsSync(file)) throw new DataError(`missing input file: ${file}`);
  return JSON.parse(fs.readFileSync(file, "utf8"));
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) throw new DataError(`non-numeric value '${row[col]}' in column ${col}`);
  return v;
}

export function uniqueSorted(rows: Row[], col: string): number[] {
  return [...new Set(rows.map((r) => Number(r[col])))].sort((a, b) => a - b);
}
