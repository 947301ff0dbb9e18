/**
 * Diverging colormaps for the radial concentration view. Nine embedded
 * three-anchor lookup tables; color is a pure function of
 * (value, colormap id, range mode).
 */

export type RangeMode =
  | { kind: "fixed" } // concentration scale clamped to [0, 400]
  | { kind: "local"; lo: number; hi: number };

export const FIXED_RANGE: [number, number] = [0, 400];

type RGB = [number, number, number];

interface Palette {
  name: string;
  low: RGB;
  mid: RGB;
  high: RGB;
}

export const PALETTES: readonly Palette[] = [
  { name: "blue-white-red", low: [33, 102, 172], mid: [247, 247, 247], high: [178, 24, 43] },
  { name: "purple-white-orange", low: [84, 39, 136], mid: [247, 247, 247], high: [230, 97, 1] },
  { name: "green-white-magenta", low: [0, 136, 55], mid: [247, 247, 247], high: [197, 27, 125] },
  { name: "teal-white-brown", low: [1, 102, 94], mid: [245, 245, 245], high: [140, 81, 10] },
  { name: "blue-yellow-red", low: [49, 54, 149], mid: [255, 255, 191], high: [165, 0, 38] },
  { name: "green-yellow-red", low: [0, 104, 55], mid: [255, 255, 191], high: [165, 0, 38] },
  { name: "navy-white-gold", low: [5, 48, 97], mid: [255, 255, 255], high: [179, 136, 25] },
  { name: "cyan-gray-pink", low: [0, 188, 212], mid: [158, 158, 158], high: [233, 30, 99] },
  { name: "indigo-white-green", low: [63, 81, 181], mid: [250, 250, 250], high: [56, 142, 60] },
];

function lerp(a: RGB, b: RGB, t: number): RGB {
  return [
    Math.round(a[0] + (b[0] - a[0]) * t),
    Math.round(a[1] + (b[1] - a[1]) * t),
    Math.round(a[2] + (b[2] - a[2]) * t),
  ];
}

export function colorFor(value: number, paletteId: number, mode: RangeMode): RGB {
  const palette = PALETTES[paletteId];
  if (!palette) throw new Error(`unknown colormap id ${paletteId}`);
  const [lo, hi] = mode.kind === "fixed" ? FIXED_RANGE : [mode.lo, mode.hi];
  if (!(hi > lo)) throw new Error("range must have hi > lo");
  const t = Math.min(1, Math.max(0, (value - lo) / (hi - lo)));
  return t < 0.5
    ? lerp(palette.low, palette.mid, t * 2)
    : lerp(palette.mid, palette.high, (t - 0.5) * 2);
}

export function toCss([r, g, b]: RGB): string {
  return `rgb(${r}, ${g}, ${b})`;
}
