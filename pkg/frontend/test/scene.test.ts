import { describe, expect, it } from "vitest";

import { layout, renderScene, type Drawable } from "../src/scene.js";
import type { WorldSnapshot } from "../src/types.js";

const world: WorldSnapshot = {
  domain_id: "store_objects",
  table_height: 0,
  gripper_holding: "red block",
  objects: [
    {
      name: "red block",
      category: "block",
      center: [0, 12],
      size: [2, 2],
      movable: true,
      is_container: false,
      has_water: false,
      inside_of: null,
    },
    {
      name: "coaster",
      category: "support",
      center: [5, 0.25],
      size: [4, 0.5],
      movable: true,
      is_container: false,
      has_water: false,
      inside_of: null,
    },
  ],
};

function recorder(): Drawable & { ops: string[] } {
  const ops: string[] = [];
  return {
    ops,
    fillStyle: "",
    strokeStyle: "",
    lineWidth: 0,
    font: "",
    clearRect: (...a) => void ops.push(`clearRect ${a.join(",")}`),
    fillRect: (...a) => void ops.push(`fillRect ${a.join(",")}`),
    strokeRect: (...a) => void ops.push(`strokeRect ${a.join(",")}`),
    beginPath: () => void ops.push("beginPath"),
    moveTo: (...a) => void ops.push(`moveTo ${a.join(",")}`),
    lineTo: (...a) => void ops.push(`lineTo ${a.join(",")}`),
    stroke: () => void ops.push("stroke"),
    fillText: (t) => void ops.push(`fillText ${t}`),
  };
}

describe("scene layout renders exclusively from server JSON", () => {
  it("maps world coordinates to canvas with y inverted", () => {
    const placed = layout(world, { width: 400, height: 300, worldSpan: 40 });
    const scale = 400 / 40;
    const tableY = 300 * 0.85;
    const block = placed.find((p) => p.name === "red block")!;
    // held block is drawn where the server says (hold height), not on table
    expect(block.y + block.h / 2).toBeCloseTo(tableY - 12 * scale);
    expect(block.x + block.w / 2).toBeCloseTo(0 * scale);
    const coaster = placed.find((p) => p.name === "coaster")!;
    // coaster bottom edge sits on the table line
    expect(coaster.y + coaster.h).toBeCloseTo(tableY);
    expect(coaster.x + coaster.w / 2).toBeCloseTo(5 * scale);
  });

  it("highlights only the proposal's argument objects", () => {
    const placed = layout(world, {
      width: 400,
      height: 300,
      highlights: ["coaster"],
    });
    expect(placed.find((p) => p.name === "coaster")!.highlighted).toBe(true);
    expect(placed.find((p) => p.name === "red block")!.highlighted).toBe(false);
  });

  it("draws one rectangle and one label per object plus the table line", () => {
    const ctx = recorder();
    renderScene(ctx, world, { width: 400, height: 300 });
    expect(ctx.ops.filter((o) => o.startsWith("fillRect")).length).toBe(2);
    expect(ctx.ops.filter((o) => o.startsWith("strokeRect")).length).toBe(2);
    expect(ctx.ops).toContain("fillText red block");
    expect(ctx.ops).toContain("fillText coaster");
    expect(ctx.ops).toContain("fillText gripper: red block");
    expect(ctx.ops.filter((o) => o === "stroke").length).toBe(1); // table line
  });
});
