import { describe, expect, it } from "vitest";

import { EmptyInput, MissingColumn } from "../src/errors.js";
import { numericColumn, parseCsv, stringColumn } from "../src/csv.js";

const SAMPLE = "distance_km,rate_hz,protocol\n4.00000000e+02,1.93813692e+00,repeater-4\n8.00000000e+02,nan,direct\n";

describe("parseCsv", () => {
  it("splits header and rows", () => {
    const table = parseCsv(SAMPLE);
    expect(table.columns).toEqual(["distance_km", "rate_hz", "protocol"]);
    expect(table.rows).toHaveLength(2);
  });

  it("tolerates CRLF and missing trailing newline", () => {
    const table = parseCsv("a,b\r\n1,2\r\n3,4");
    expect(table.rows).toEqual([["1", "2"], ["3", "4"]]);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(EmptyInput);
  });

  it("rejects header-only input", () => {
    expect(() => parseCsv("a,b\n")).toThrow(EmptyInput);
  });
});

describe("columns", () => {
  it("coerces numerics, nan included", () => {
    const table = parseCsv(SAMPLE);
    expect(numericColumn(table, "distance_km")).toEqual([400, 800]);
    expect(numericColumn(table, "rate_hz")[1]).toBeNaN();
  });

  it("reads string columns", () => {
    expect(stringColumn(parseCsv(SAMPLE), "protocol")).toEqual(["repeater-4", "direct"]);
  });

  it("names the missing column and what exists", () => {
    expect(() => numericColumn(parseCsv(SAMPLE), "rate")).toThrow(MissingColumn);
    expect(() => numericColumn(parseCsv(SAMPLE), "rate")).toThrow(/rate_hz/);
  });
});
