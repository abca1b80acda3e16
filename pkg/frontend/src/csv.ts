/** Strict reader for the harness CSV schema: one header row, numeric cells
 * (empty cells allowed, representing absent values). */

import { readFileSync } from "node:fs";

export interface Table {
  columns: string[];
  rows: (number | null)[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(`row ${i + 1}: expected ${columns.length} cells, got ${cells.length}`);
    }
    return cells.map((c) => {
      if (c === "") return null;
      const v = Number(c);
      if (Number.isNaN(v)) throw new Error(`row ${i + 1}: non-numeric cell ${JSON.stringify(c)}`);
      return v;
    });
  });
  return { columns, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

/** Extract one column by name; a missing column is a schema error (the
 * renderers must fail before producing partial output). */
export function column(table: Table, name: string): (number | null)[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column ${JSON.stringify(name)} (have ${table.columns.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((v, i) => {
    if (v === null) throw new Error(`column ${name}: empty cell in row ${i + 1}`);
    return v;
  });
}
