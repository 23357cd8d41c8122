import { describe, expect, it } from "vitest";
import { ViewTransform } from "../src/view";

describe("ViewTransform", () => {
  it("round-trips meter coordinates through the screen", () => {
    const view = new ViewTransform(5.12, 5.12, 700, 700);
    for (const p of [
      { x: 0, y: 0 },
      { x: 5.12, y: 5.12 },
      { x: 1.234, y: 4.321 },
    ]) {
      const back = view.toMap(view.toScreen(p));
      expect(back.x).toBeCloseTo(p.x, 9);
      expect(back.y).toBeCloseTo(p.y, 9);
    }
  });

  it("flips the y axis so map-up is screen-up", () => {
    const view = new ViewTransform(2, 2, 200, 200);
    const low = view.toScreen({ x: 1, y: 0.2 });
    const high = view.toScreen({ x: 1, y: 1.8 });
    expect(high.y).toBeLessThan(low.y);
  });

  it("maps grid cells to stable rectangles independent of canvas size", () => {
    for (const size of [300, 700, 1100]) {
      const view = new ViewTransform(2, 2, size, size);
      const r = view.cellRect(3, 4, 0.1);
      // the rect must always cover exactly one cell of side resolution*scale
      expect(r.w).toBeCloseTo(0.1 * view.scale, 9);
      expect(r.h).toBeCloseTo(0.1 * view.scale, 9);
      const center = view.toMap({ x: r.x + r.w / 2, y: r.y + r.h / 2 });
      expect(center.x).toBeCloseTo(0.35, 9);
      expect(center.y).toBeCloseTo(0.45, 9);
    }
  });

  it("letterboxes non-square maps without distortion", () => {
    const view = new ViewTransform(4, 2, 400, 400);
    const a = view.toScreen({ x: 0, y: 0 });
    const b = view.toScreen({ x: 4, y: 2 });
    expect(Math.abs(b.x - a.x)).toBeGreaterThan(Math.abs(b.y - a.y)); // width dominates
  });
});
