// 2D scene renderer. Draws exactly what the server snapshot says: the
// table line, one rectangle per object (at the server-given position,
// including held objects at hold height), water fill, and a highlight
// around the pending proposal's argument objects.

import type { WorldSnapshot } from "./types.js";

// the subset of CanvasRenderingContext2D the renderer touches, so tests
// can pass a recording stub
export interface Drawable {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

const CATEGORY_COLORS: Record<string, string> = {
  block: "#4e79a7",
  support: "#9c755f",
  tableware: "#bab0ab",
  container: "#76b7b2",
  food: "#f28e2b",
  fixture: "#59a14f",
};

export interface SceneOptions {
  width: number;
  height: number;
  highlights?: string[];
  worldSpan?: number; // world units mapped onto the canvas width
}

export interface Placed {
  name: string;
  x: number;
  y: number;
  w: number;
  h: number;
  highlighted: boolean;
}

// pure layout: world coords (x lateral, y up) -> canvas coords (y down)
export function layout(world: WorldSnapshot, opts: SceneOptions): Placed[] {
  const span = opts.worldSpan ?? 40;
  const scale = opts.width / span;
  const tableY = opts.height * 0.85;
  const highlights = new Set(opts.highlights ?? []);
  return world.objects.map((o) => {
    const w = o.size[0] * scale;
    const h = o.size[1] * scale;
    const cx = o.center[0] * scale;
    const cy = tableY - (o.center[1] - world.table_height) * scale;
    return {
      name: o.name,
      x: cx - w / 2,
      y: cy - h / 2,
      w,
      h,
      highlighted: highlights.has(o.name),
    };
  });
}

export function renderScene(
  ctx: Drawable,
  world: WorldSnapshot,
  opts: SceneOptions,
): void {
  ctx.clearRect(0, 0, opts.width, opts.height);
  const tableY = opts.height * 0.85;
  ctx.strokeStyle = "#333";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(0, tableY);
  ctx.lineTo(opts.width, tableY);
  ctx.stroke();

  const byName = new Map(world.objects.map((o) => [o.name, o]));
  for (const p of layout(world, opts)) {
    const obj = byName.get(p.name)!;
    ctx.fillStyle = CATEGORY_COLORS[obj.category] ?? "#b07aa1";
    ctx.fillRect(p.x, p.y, p.w, p.h);
    if (obj.has_water) {
      ctx.fillStyle = "#86bcdc";
      ctx.fillRect(p.x + 2, p.y + p.h * 0.4, p.w - 4, p.h * 0.5);
    }
    ctx.strokeStyle = p.highlighted ? "#e15759" : "#222";
    ctx.lineWidth = p.highlighted ? 3 : 1;
    ctx.strokeRect(p.x, p.y, p.w, p.h);
    ctx.fillStyle = "#111";
    ctx.font = "11px sans-serif";
    ctx.fillText(p.name, p.x, p.y - 4);
  }

  if (world.gripper_holding) {
    ctx.fillStyle = "#555";
    ctx.font = "12px sans-serif";
    ctx.fillText(`gripper: ${world.gripper_holding}`, 8, 16);
  }
}
