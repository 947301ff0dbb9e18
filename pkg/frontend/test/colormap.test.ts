import { describe, expect, it } from "vitest";

import { colorFor, PALETTES, toCss } from "../src/colormap.js";

describe("colormaps", () => {
  it("ships nine distinct palettes", () => {
    expect(PALETTES).toHaveLength(9);
    expect(new Set(PALETTES.map((p) => p.name)).size).toBe(9);
  });

  it("is a pure function of value, id and range mode", () => {
    const a = colorFor(123.4, 2, { kind: "fixed" });
    const b = colorFor(123.4, 2, { kind: "fixed" });
    expect(a).toEqual(b);
  });

  it("fixed mode clamps to [0, 400]", () => {
    expect(colorFor(-50, 0, { kind: "fixed" })).toEqual(colorFor(0, 0, { kind: "fixed" }));
    expect(colorFor(900, 0, { kind: "fixed" })).toEqual(colorFor(400, 0, { kind: "fixed" }));
  });

  it("hits the anchors at the range ends and middle", () => {
    const p = PALETTES[0]!;
    expect(colorFor(0, 0, { kind: "fixed" })).toEqual(p.low);
    expect(colorFor(200, 0, { kind: "fixed" })).toEqual(p.mid);
    expect(colorFor(400, 0, { kind: "fixed" })).toEqual(p.high);
  });

  it("local mode rescales to the given bounds", () => {
    const local = { kind: "local", lo: 10, hi: 20 } as const;
    expect(colorFor(10, 1, local)).toEqual(PALETTES[1]!.low);
    expect(colorFor(20, 1, local)).toEqual(PALETTES[1]!.high);
  });

  it("rejects unknown ids and degenerate ranges", () => {
    expect(() => colorFor(0, 9, { kind: "fixed" })).toThrow();
    expect(() => colorFor(0, 0, { kind: "local", lo: 5, hi: 5 })).toThrow();
  });

  it("formats css colors", () => {
    expect(toCss([1, 2, 3])).toBe("rgb(1, 2, 3)");
  });
});
