// Learning-curve chart: cumulative predicate/operator counts per step,
// drawn as step lines on a canvas.

import type { Drawable } from "./scene.js";

export interface CurvePoint {
  step: number;
  predicates: number;
  operators: number;
}

export function drawCurve(
  ctx: Drawable,
  points: CurvePoint[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  if (!points.length) return;
  const pad = 24;
  const maxStep = Math.max(1, ...points.map((p) => p.step));
  const maxCount = Math.max(
    1,
    ...points.map((p) => Math.max(p.predicates, p.operators)),
  );
  const sx = (step: number) => pad + (step / maxStep) * (width - 2 * pad);
  const sy = (count: number) =>
    height - pad - (count / maxCount) * (height - 2 * pad);

  const series: ["predicates" | "operators", string][] = [
    ["predicates", "#4e79a7"],
    ["operators", "#e15759"],
  ];
  for (const [key, color] of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(sx(points[0].step), sy(points[0][key]));
    for (let i = 1; i < points.length; i++) {
      // step plot: horizontal then vertical
      ctx.lineTo(sx(points[i].step), sy(points[i - 1][key]));
      ctx.lineTo(sx(points[i].step), sy(points[i][key]));
    }
    ctx.stroke();
  }
  ctx.fillStyle = "#4e79a7";
  ctx.font = "11px sans-serif";
  ctx.fillText("predicates (incl. negations)", pad, 14);
  ctx.fillStyle = "#e15759";
  ctx.fillText("operators", pad + 170, 14);
}
