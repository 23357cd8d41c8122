import type { TrainEpochRow } from "./types";

export interface Series {
  label: string;
  color: string;
  values: number[];
}

export function trainingSeries(rows: TrainEpochRow[]): Series[] {
  return [
    { label: "d_loss", color: "#d62728", values: rows.map((r) => r.d_loss) },
    { label: "g_loss", color: "#9467bd", values: rows.map((r) => r.g_loss) },
    { label: "val homotopy", color: "#0e8a5f", values: rows.map((r) => r.val_homotopy) },
  ];
}

/** Minimal multi-series line chart on a canvas; no dependencies. */
export function drawChart(ctx: CanvasRenderingContext2D, series: Series[], pad = 28): void {
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, w, h);
  const n = Math.max(...series.map((s) => s.values.length), 0);
  if (n === 0) {
    ctx.fillStyle = "#777";
    ctx.font = "12px sans-serif";
    ctx.fillText("no epochs yet", 10, 20);
    return;
  }
  const all = series.flatMap((s) => s.values).filter((v) => Number.isFinite(v));
  const lo = Math.min(...all, 0);
  const hi = Math.max(...all, 1);
  const sx = (i: number) => pad + (n <= 1 ? 0 : (i / (n - 1)) * (w - 2 * pad));
  const sy = (v: number) => h - pad - ((v - lo) / (hi - lo || 1)) * (h - 2 * pad);

  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  for (const s of series) {
    ctx.beginPath();
    s.values.forEach((v, i) => {
      if (i === 0) ctx.moveTo(sx(i), sy(v));
      else ctx.lineTo(sx(i), sy(v));
    });
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.stroke();
  }
  ctx.lineWidth = 1;
  ctx.font = "11px sans-serif";
  let lx = pad + 4;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, pad - 6);
    lx += ctx.measureText(s.label).width + 14;
  }
  ctx.fillStyle = "#555";
  ctx.fillText(hi.toFixed(2), 2, pad + 4);
  ctx.fillText(lo.toFixed(2), 2, h - pad);
}
