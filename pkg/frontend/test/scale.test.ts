import { describe, expect, it } from "vitest";

import { formatTick, linearScale, logScale } from "../src/scale.js";

describe("linearScale", () => {
  it("maps the domain endpoints onto the range", () => {
    const s = linearScale([0, 10], [100, 200]);
    expect(s.map(0)).toBe(100);
    expect(s.map(10)).toBe(200);
    expect(s.map(5)).toBe(150);
  });

  it("produces round ticks inside the domain", () => {
    const ticks = linearScale([0, 2800], [0, 1]).ticks();
    expect(ticks[0]).toBe(0);
    expect(ticks).toContain(500);
    expect(ticks.every((t) => t >= 0 && t <= 2800)).toBe(true);
  });

  it("handles inverted ranges (SVG y grows downward)", () => {
    const s = linearScale([0, 1], [400, 40]);
    expect(s.map(1)).toBe(40);
    expect(s.map(0)).toBe(400);
  });
});

describe("logScale", () => {
  it("maps decades evenly", () => {
    const s = logScale([1, 100], [0, 2]);
    expect(s.map(10)).toBeCloseTo(1, 12);
  });

  it("ticks at powers of ten", () => {
    expect(logScale([0.5, 2000], [0, 1]).ticks()).toEqual([1, 10, 100, 1000]);
  });

  it("strides decades on very wide domains", () => {
    const ticks = logScale([1e-50, 1e10], [0, 1]).ticks();
    expect(ticks.length).toBeLessThanOrEqual(9);
    expect(ticks.length).toBeGreaterThanOrEqual(6);
  });

  it("rejects nonpositive domains", () => {
    expect(() => logScale([0, 10], [0, 1])).toThrow(RangeError);
  });
});

describe("formatTick", () => {
  it("keeps small magnitudes plain", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(500)).toBe("500");
    expect(formatTick(0.25)).toBe("0.25");
  });

  it("uses powers of ten for extremes", () => {
    expect(formatTick(1e6)).toBe("10^6");
    expect(formatTick(2e-5)).toBe("2×10^-5");
  });
});
