import { EmptyInput, MissingColumn } from "./errors.js";

export interface Table {
  columns: string[];
  rows: string[][];
}

/** Parse machine-generated CSV: comma-separated, no quoting, one header line. */
export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) throw new EmptyInput("input is empty");
  const columns = lines[0]!.split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  if (rows.length === 0) throw new EmptyInput("header only, no records");
  return { columns, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new MissingColumn(name, table.columns);
  return idx;
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => Number(row[idx]));
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => row[idx] ?? "");
}
