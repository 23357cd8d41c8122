import type { PointXY, ScenarioDoc } from "./types";

/** Decoded occupancy: row-major Uint8Array, cells[iy * width + ix]. */
export interface DecodedGrid {
  width: number;
  height: number;
  resolution: number;
  cells: Uint8Array;
}

export function decodeOccupancy(doc: ScenarioDoc): DecodedGrid {
  const cells = new Uint8Array(doc.width * doc.height);
  let at = 0;
  for (const [value, count] of doc.occupancy_rle) {
    cells.fill(value, at, at + count);
    at += count;
  }
  if (at !== cells.length) {
    throw new Error(`occupancy_rle covers ${at} cells, expected ${cells.length}`);
  }
  return { width: doc.width, height: doc.height, resolution: doc.resolution, cells };
}

function cellOccupied(grid: DecodedGrid, ix: number, iy: number): boolean {
  if (ix < 0 || iy < 0 || ix >= grid.width || iy >= grid.height) return true;
  return grid.cells[iy * grid.width + ix] === 1;
}

/** Client-side preview of the segment collision test: samples the segment at
 * half-resolution spacing and checks a disk of cell centers around each
 * sample. Drawing feedback only; the service re-validates on submit. */
export function segmentBlocked(grid: DecodedGrid, robotRadius: number, a: PointXY, b: PointXY): boolean {
  const length = Math.hypot(b.x - a.x, b.y - a.y);
  const res = grid.resolution;
  const steps = Math.max(1, Math.ceil(length / (res / 2)));
  const reach = Math.ceil(robotRadius / res) + 1;
  for (let k = 0; k <= steps; k++) {
    const t = k / steps;
    const px = a.x + t * (b.x - a.x);
    const py = a.y + t * (b.y - a.y);
    if (px < 0 || py < 0 || px >= grid.width * res || py >= grid.height * res) return true;
    const cx = Math.floor(px / res);
    const cy = Math.floor(py / res);
    for (let iy = cy - reach; iy <= cy + reach; iy++) {
      for (let ix = cx - reach; ix <= cx + reach; ix++) {
        const centerX = (ix + 0.5) * res;
        const centerY = (iy + 0.5) * res;
        const d = Math.hypot(centerX - px, centerY - py);
        if (d <= robotRadius && cellOccupied(grid, ix, iy)) return true;
      }
    }
  }
  return false;
}

export function insideGoal(doc: ScenarioDoc, p: PointXY): boolean {
  return Math.hypot(p.x - doc.goal.x, p.y - doc.goal.y) <= doc.goal_radius;
}
