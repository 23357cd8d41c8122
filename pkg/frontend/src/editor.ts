import { decodeOccupancy, insideGoal, segmentBlocked, type DecodedGrid } from "./grid";
import { simplifyPolyline } from "./simplify";
import type { PointXY, ScenarioDoc } from "./types";

export interface StrokeState {
  points: PointXY[];
  segmentOk: boolean[];
  endsInGoal: boolean;
}

/** Freehand demo capture over one scenario.
 *
 * The stroke is validated segment-by-segment while drawing so collisions
 * light up immediately; the authoritative check still happens server-side on
 * submission. Stored points are meters.
 */
export class DemoEditor {
  private readonly doc: ScenarioDoc;
  private readonly grid: DecodedGrid;
  private points: PointXY[] = [];
  private segmentOk: boolean[] = [];
  drawing = false;

  constructor(doc: ScenarioDoc) {
    this.doc = doc;
    this.grid = decodeOccupancy(doc);
  }

  begin(): void {
    this.points = [{ ...this.doc.start }];
    this.segmentOk = [];
    this.drawing = true;
  }

  extend(p: PointXY, minSpacing = 0.03): void {
    if (!this.drawing) return;
    const last = this.points[this.points.length - 1];
    if (Math.hypot(p.x - last.x, p.y - last.y) < minSpacing) return;
    this.points.push(p);
    this.segmentOk.push(!segmentBlocked(this.grid, this.doc.robot_radius, last, p));
  }

  finish(): void {
    this.drawing = false;
  }

  clear(): void {
    this.points = [];
    this.segmentOk = [];
    this.drawing = false;
  }

  state(): StrokeState {
    return {
      points: this.points,
      segmentOk: this.segmentOk,
      endsInGoal:
        this.points.length >= 2 && insideGoal(this.doc, this.points[this.points.length - 1]),
    };
  }

  /** True when every drawn segment is clear and the stroke reaches the goal. */
  isValid(): boolean {
    const s = this.state();
    return s.points.length >= 2 && s.endsInGoal && s.segmentOk.every(Boolean);
  }

  /** Simplified polyline ready for POST /demos; null while invalid. */
  submission(tolerance = 0.05): PointXY[] | null {
    if (!this.isValid()) return null;
    return simplifyPolyline(this.points, tolerance);
  }
}
