import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { Snapshot } from "../src/protocol.js";
import { buildScene, gazeRayTo, pointToScreen, uvToCanvas, worldPoint } from "../src/scene.js";

const snapshot: Snapshot = JSON.parse(
  readFileSync(new URL("./fixtures/snapshot15.json", import.meta.url), "utf-8"),
);

describe("unrolled scene projection", () => {
  const scene = buildScene(snapshot, 960, 420);

  it("lays out one rect per screen, all inside the canvas", () => {
    expect(scene.rects).toHaveLength(15);
    for (const r of scene.rects) {
      expect(r.x).toBeGreaterThanOrEqual(0);
      expect(r.y).toBeGreaterThanOrEqual(0);
      expect(r.x + r.w).toBeLessThanOrEqual(960);
      expect(r.y + r.h).toBeLessThanOrEqual(420);
    }
  });

  it("keeps grid order: lower columns left, lower rows up", () => {
    const byId = new Map(scene.rects.map((r) => [r.id, r]));
    // col 0 is the leftmost screen of each row, row 0 the top row
    expect(byId.get(0)!.x).toBeLessThan(byId.get(1)!.x);
    expect(byId.get(1)!.x).toBeLessThan(byId.get(2)!.x);
    expect(byId.get(0)!.y).toBeLessThan(byId.get(5)!.y);
    expect(byId.get(5)!.y).toBeLessThan(byId.get(10)!.y);
  });

  it("pointToScreen inverts uvToCanvas", () => {
    for (const id of [0, 7, 14]) {
      for (const [u, v] of [[0.1, 0.1], [0.5, 0.5], [0.9, 0.2]] as const) {
        const p = uvToCanvas(scene, id, u, v)!;
        const back = pointToScreen(scene, p.px, p.py)!;
        expect(back.screenId).toBe(id);
        expect(back.u).toBeCloseTo(u, 9);
        expect(back.v).toBeCloseTo(v, 9);
      }
    }
  });

  it("returns null between screens", () => {
    const a = scene.rects.find((r) => r.id === 7)!;
    const b = scene.rects.find((r) => r.id === 8)!;
    const gapX = (a.x + a.w + b.x) / 2;
    expect(pointToScreen(scene, gapX, a.y + a.h / 2)).toBeNull();
  });

  it("computes world points consistent with screen axes", () => {
    const s = snapshot.screens.find((x) => x.id === 7)!;
    expect(worldPoint(snapshot, 7, 0.5, 0.5)).toEqual([s.cx, s.cy, s.cz]);
    const [x, y, z] = worldPoint(snapshot, 7, 1.0, 0.5);
    const dist = Math.hypot(x - s.cx, y - s.cy, z - s.cz);
    expect(dist).toBeCloseTo(s.w_cm / 2, 6);
  });

  it("gaze rays are unit length and point from the anchor", () => {
    const ray = gazeRayTo(snapshot, 7, 0.5, 0.5);
    expect(ray.origin).toEqual([0, 0, 0]);
    expect(Math.hypot(...ray.direction)).toBeCloseTo(1, 9);
    // screen 7 is the forward center screen in this fixture
    expect(ray.direction[0]).toBeCloseTo(1, 6);
  });
});
