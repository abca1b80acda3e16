import { describe, expect, it } from "vitest";

import { column, numericColumn, parseCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("parses header and numeric rows", () => {
    const t = parseCsv("a,b\n1,2\n3.5,-4e-2\n");
    expect(t.columns).toEqual(["a", "b"]);
    expect(t.rows).toEqual([
      [1, 2],
      [3.5, -0.04],
    ]);
  });

  it("keeps empty cells as null", () => {
    const t = parseCsv("q,r\n2,\n3,1.5\n");
    expect(column(t, "r")).toEqual([null, 1.5]);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/expected 2 cells/);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseCsv("a\nfoo\n")).toThrow(/non-numeric/);
  });

  it("rejects missing columns", () => {
    const t = parseCsv("a,b\n1,2\n");
    expect(() => column(t, "c")).toThrow(/missing column "c"/);
    expect(() => numericColumn(t, "c")).toThrow(/missing column/);
  });

  it("numericColumn rejects empty cells", () => {
    const t = parseCsv("a,b\n,1\n");
    expect(() => numericColumn(t, "a")).toThrow(/empty cell/);
  });
});
