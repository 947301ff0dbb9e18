/**
 * Angle <-> cell-index conversions for brushes on the 400-cell membrane
 * circle. Convention shared with the CLI: index = floor(angle / 0.9) mod 400,
 * intervals inclusive on both ends, wrapping across 0 degrees when the start
 * angle exceeds the end angle.
 */

export const N_CELLS = 400;
export const CELL_DEG = 360 / N_CELLS;

const mod = (v: number, m: number) => ((v % m) + m) % m;

export function angleToCell(deg: number): number {
  if (!Number.isFinite(deg)) throw new Error(`bad angle ${deg}`);
  return mod(Math.floor(deg / CELL_DEG), N_CELLS);
}

export interface BrushInterval {
  startDeg: number;
  endDeg: number;
}

/** Cells covered by a brush, ascending; wraps when start > end. */
export function brushToCells(brush: BrushInterval): number[] {
  const lo = angleToCell(brush.startDeg);
  const hi = angleToCell(brush.endDeg);
  const cells: number[] = [];
  if (lo <= hi) {
    for (let i = lo; i <= hi; i++) cells.push(i);
  } else {
    for (let i = 0; i <= hi; i++) cells.push(i);
    for (let i = lo; i < N_CELLS; i++) cells.push(i);
  }
  return cells;
}

/**
 * Contiguous circular arcs covering a cell set, as [startCell, endCell]
 * inclusive pairs; an arc crossing cell 0 comes back as a single wrapped
 * pair. Used to re-render a mask echoed by the server.
 */
export function cellsToArcs(cells: number[]): Array<[number, number]> {
  if (cells.length === 0) return [];
  const member = new Array<boolean>(N_CELLS).fill(false);
  for (const c of cells) {
    if (!Number.isInteger(c) || c < 0 || c >= N_CELLS) throw new Error(`bad cell ${c}`);
    member[c] = true;
  }
  if (member.every(Boolean)) return [[0, N_CELLS - 1]];
  const arcs: Array<[number, number]> = [];
  // walk from a gap so a wrapped arc is not split
  let anchor = 0;
  while (member[anchor]) anchor++;
  let start: number | null = null;
  for (let step = 1; step <= N_CELLS; step++) {
    const i = mod(anchor + step, N_CELLS);
    if (member[i] && start === null) start = i;
    if (!member[i] && start !== null) {
      arcs.push([start, mod(i - 1, N_CELLS)]);
      start = null;
    }
  }
  return arcs;
}

/** Arc back to degree bounds (cell centers snap to the floor convention). */
export function arcToBrush(arc: [number, number]): BrushInterval {
  return { startDeg: arc[0] * CELL_DEG, endDeg: arc[1] * CELL_DEG };
}
