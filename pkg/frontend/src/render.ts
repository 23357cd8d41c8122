import type { DecodedGrid } from "./grid";
import type { PathDoc, PointXY, ScenarioDoc } from "./types";
import { ViewTransform } from "./view";

export const PATH_STYLES: Record<string, { color: string; dash: number[]; width: number }> = {
  demo_human: { color: "#1668c7", dash: [], width: 3 },
  demo_oracle: { color: "#0e8a5f", dash: [], width: 3 },
  rrt: { color: "#9467bd", dash: [6, 4], width: 2 },
  rrt_star: { color: "#d62728", dash: [2, 3], width: 2 },
  gan_rrt_star: { color: "#ff7f0e", dash: [], width: 2.5 },
};

// front-zone shading uses the feature configuration served with the app;
// these defaults mirror the trainer config defaults
export interface ZoneConfig {
  sigma_front: number;
  sigma_back: number;
  sigma_side: number;
}

export const DEFAULT_ZONES: ZoneConfig = { sigma_front: 1.2, sigma_back: 0.6, sigma_side: 0.45 };

export function drawScenario(
  ctx: CanvasRenderingContext2D,
  doc: ScenarioDoc,
  grid: DecodedGrid,
  view: ViewTransform,
  zones: ZoneConfig = DEFAULT_ZONES,
): void {
  ctx.fillStyle = "#fbfbf8";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);

  const origin = view.toScreen({ x: 0, y: doc.height * doc.resolution });
  const extent = view.toScreen({ x: doc.width * doc.resolution, y: 0 });
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(origin.x, origin.y, extent.x - origin.x, extent.y - origin.y);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(origin.x, origin.y, extent.x - origin.x, extent.y - origin.y);

  ctx.fillStyle = "#42423e";
  for (let iy = 0; iy < grid.height; iy++) {
    for (let ix = 0; ix < grid.width; ix++) {
      if (grid.cells[iy * grid.width + ix] === 1) {
        const r = view.cellRect(ix, iy, grid.resolution);
        ctx.fillRect(r.x, r.y, r.w + 0.5, r.h + 0.5);
      }
    }
  }

  for (const ped of doc.pedestrians) {
    drawPedestrian(ctx, view, ped.x, ped.y, ped.heading, ped.body_radius, zones);
  }

  drawMarker(ctx, view.toScreen(doc.start), "#0e8a5f", "S");
  const goalPx = view.toScreen(doc.goal);
  ctx.beginPath();
  ctx.arc(goalPx.x, goalPx.y, doc.goal_radius * view.scale, 0, 2 * Math.PI);
  ctx.strokeStyle = "#c02020";
  ctx.setLineDash([4, 3]);
  ctx.stroke();
  ctx.setLineDash([]);
  drawMarker(ctx, goalPx, "#c02020", "G");
}

function drawPedestrian(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  x: number,
  y: number,
  heading: number,
  bodyRadius: number,
  zones: ZoneConfig,
): void {
  const c = view.toScreen({ x, y });
  // front-zone shading: ellipse-ish wedge along the heading
  ctx.save();
  ctx.translate(c.x, c.y);
  ctx.rotate(-heading); // screen y is flipped
  ctx.beginPath();
  ctx.ellipse(0, 0, zones.sigma_front * view.scale, zones.sigma_side * view.scale, 0, -Math.PI / 2, Math.PI / 2);
  ctx.closePath();
  ctx.fillStyle = "rgba(230, 140, 30, 0.15)";
  ctx.fill();
  ctx.restore();

  ctx.beginPath();
  ctx.arc(c.x, c.y, bodyRadius * view.scale, 0, 2 * Math.PI);
  ctx.fillStyle = "rgba(200, 60, 30, 0.75)";
  ctx.fill();
  const tip = view.toScreen({ x: x + Math.cos(heading) * bodyRadius * 2.2, y: y + Math.sin(heading) * bodyRadius * 2.2 });
  ctx.beginPath();
  ctx.moveTo(c.x, c.y);
  ctx.lineTo(tip.x, tip.y);
  ctx.strokeStyle = "rgba(140, 30, 10, 0.9)";
  ctx.lineWidth = 2;
  ctx.stroke();
  ctx.lineWidth = 1;
}

function drawMarker(ctx: CanvasRenderingContext2D, at: PointXY, color: string, label: string): void {
  ctx.beginPath();
  ctx.arc(at.x, at.y, 6, 0, 2 * Math.PI);
  ctx.fillStyle = color;
  ctx.fill();
  ctx.fillStyle = "#fff";
  ctx.font = "9px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(label, at.x, at.y);
}

export function drawPath(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  path: PathDoc,
  highlight = false,
): void {
  const style = PATH_STYLES[path.source] ?? { color: "#333", dash: [], width: 2 };
  ctx.beginPath();
  path.points.forEach((p, i) => {
    const s = view.toScreen(p);
    if (i === 0) ctx.moveTo(s.x, s.y);
    else ctx.lineTo(s.x, s.y);
  });
  ctx.strokeStyle = style.color;
  ctx.lineWidth = highlight ? style.width + 1.5 : style.width;
  ctx.setLineDash(style.dash);
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.lineWidth = 1;
}

/** Draw an in-progress demo stroke with per-segment validity coloring. */
export function drawStroke(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  points: PointXY[],
  segmentOk: boolean[],
): void {
  for (let i = 0; i + 1 < points.length; i++) {
    const a = view.toScreen(points[i]);
    const b = view.toScreen(points[i + 1]);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.strokeStyle = segmentOk[i] ? "#1668c7" : "#e02020";
    ctx.lineWidth = 3;
    ctx.stroke();
  }
  ctx.lineWidth = 1;
}
