import type { PointXY } from "./types";

/** Single view transform between meter space and canvas pixels.
 *
 * Paths and clicks are always stored in meters; the transform is the only
 * place pixels appear, so zoom never changes stored data. Canvas y grows
 * downward while map y grows upward, hence the flip.
 */
export class ViewTransform {
  readonly scale: number; // pixels per meter
  private readonly offsetX: number;
  private readonly offsetY: number;
  private readonly mapHeight: number;

  constructor(mapWidthM: number, mapHeightM: number, canvasW: number, canvasH: number, margin = 10) {
    const usableW = canvasW - 2 * margin;
    const usableH = canvasH - 2 * margin;
    this.scale = Math.min(usableW / mapWidthM, usableH / mapHeightM);
    this.offsetX = margin + (usableW - mapWidthM * this.scale) / 2;
    this.offsetY = margin + (usableH - mapHeightM * this.scale) / 2;
    this.mapHeight = mapHeightM;
  }

  toScreen(p: PointXY): PointXY {
    return {
      x: this.offsetX + p.x * this.scale,
      y: this.offsetY + (this.mapHeight - p.y) * this.scale,
    };
  }

  toMap(p: PointXY): PointXY {
    return {
      x: (p.x - this.offsetX) / this.scale,
      y: this.mapHeight - (p.y - this.offsetY) / this.scale,
    };
  }

  /** Screen rectangle of grid cell (ix, iy): stable under any canvas size. */
  cellRect(ix: number, iy: number, resolution: number): { x: number; y: number; w: number; h: number } {
    const topLeft = this.toScreen({ x: ix * resolution, y: (iy + 1) * resolution });
    const size = resolution * this.scale;
    return { x: topLeft.x, y: topLeft.y, w: size, h: size };
  }
}
