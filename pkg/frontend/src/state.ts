/**
 * Session view state: brushes, sliders, recommended values, colormap and
 * quick-view modes. Pure state transitions with the invariants enforced
 * here so every view renders from a consistent snapshot.
 */

import { BrushInterval, brushToCells } from "./brush.js";
import type { OptimizeResponse } from "./api.js";

export const N_PARAMS = 35;

export type BrushKind = "sensitivity" | "maximize" | "minimize";

/** Provenance of a recommended parameter value, with its display color. */
export type Origin = "current" | "max" | "min" | "maxmin";

export const ORIGIN_COLORS: Record<Origin, string> = {
  current: "black",
  max: "red",
  min: "blue",
  maxmin: "green",
};

export interface RecommendedValue {
  origin: Origin;
  values: number[]; // length 35
}

export type QuickViewMode = "absolute" | "diff";

export class ViewState {
  instanceId: number | null = null;
  sliders: number[] = new Array(N_PARAMS).fill(0);
  brushes: Partial<Record<BrushKind, BrushInterval>> = {};
  recommended: Partial<Record<Origin, number[]>> = {};
  colormapId = 0;
  rangeMode: "fixed" | "local" = "fixed";
  quickView: QuickViewMode = "absolute";
  dendrogramDepth = 1;
  optimizePending = false;

  setSlider(index: number, value: number): void {
    if (!Number.isInteger(index) || index < 0 || index >= N_PARAMS) {
      throw new Error(`bad parameter index ${index}`);
    }
    this.sliders[index] = Math.min(1, Math.max(-1, value));
  }

  /** Textbox entry: rejects values outside [-1, 1] instead of clamping. */
  setSliderFromText(index: number, text: string): void {
    const value = Number(text);
    if (!Number.isFinite(value) || value < -1 || value > 1) {
      throw new Error(`value must be a number in [-1, 1], got ${text.trim()}`);
    }
    this.setSlider(index, value);
  }

  setBrush(kind: BrushKind, brush: BrushInterval | null): void {
    if (brush === null) {
      delete this.brushes[kind];
      return;
    }
    const cells = new Set(brushToCells(brush));
    const other: BrushKind | null =
      kind === "maximize" ? "minimize" : kind === "minimize" ? "maximize" : null;
    if (other && this.brushes[other]) {
      const existing = brushToCells(this.brushes[other]!);
      if (existing.some((c) => cells.has(c))) {
        throw new Error("maximize and minimize selections must be disjoint");
      }
    }
    this.brushes[kind] = brush;
  }

  maskFor(kind: BrushKind): number[] {
    const brush = this.brushes[kind];
    return brush ? brushToCells(brush) : [];
  }

  /** Stores the instance's own values under the black "current" origin. */
  setCurrent(values: number[]): void {
    this.recommended.current = this.checkValues(values);
  }

  /** Fills the red/blue/green recommended texts from an optimize response. */
  applyOptimizeResponse(resp: OptimizeResponse): void {
    this.recommended[resp.origin] = this.checkValues(resp.optimum);
  }

  /** Clicking a recommended value snaps every slider to that origin. */
  snapToOrigin(origin: Origin): void {
    const values = this.recommended[origin];
    if (!values) throw new Error(`no recommended values for origin ${origin}`);
    this.sliders = values.slice();
  }

  recommendedTexts(index: number): Array<{ origin: Origin; color: string; text: string }> {
    const out: Array<{ origin: Origin; color: string; text: string }> = [];
    for (const origin of ["current", "max", "min", "maxmin"] as Origin[]) {
      const values = this.recommended[origin];
      if (values) {
        out.push({ origin, color: ORIGIN_COLORS[origin], text: values[index]!.toFixed(3) });
      }
    }
    return out;
  }

  private checkValues(values: number[]): number[] {
    if (values.length !== N_PARAMS || values.some((v) => !Number.isFinite(v))) {
      throw new Error(`expected ${N_PARAMS} finite values`);
    }
    return values.slice();
  }
}

/**
 * Vertical stagger for recommended-value labels on one parameter bar:
 * labels whose values sit closer than minGap share a column and get
 * stacked rows instead of overlapping.
 */
export function staggerLabels(
  values: Array<{ origin: Origin; value: number }>,
  minGap = 0.08,
): Array<{ origin: Origin; value: number; row: number }> {
  const sorted = values.slice().sort((a, b) => a.value - b.value);
  const out: Array<{ origin: Origin; value: number; row: number }> = [];
  let prevValue = -Infinity;
  let row = 0;
  for (const item of sorted) {
    row = item.value - prevValue < minGap ? row + 1 : 0;
    out.push({ ...item, row });
    prevValue = item.value;
  }
  return out;
}
