import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { GazeEmulator, leanRecord, TrackpadEmulator } from "../src/input.js";
import { Snapshot } from "../src/protocol.js";
import { buildScene, uvToCanvas } from "../src/scene.js";
import { cmToPane, PaneGeometry } from "../src/scale.js";

const PANE: PaneGeometry = {
  tabletWcm: 21.754548,
  tabletHcm: 13.596593,
  bezelCm: 2.0,
  widthPx: 520,
};

const snapshot: Snapshot = JSON.parse(
  readFileSync(new URL("./fixtures/snapshot15.json", import.meta.url), "utf-8"),
);

describe("trackpad emulation", () => {
  it("a drag across the pane reproduces the intended cm displacement", () => {
    const pad = new TrackpadEmulator(PANE);
    const start = cmToPane(PANE, 2.0, 3.0);
    const end = cmToPane(PANE, 12.5, 9.0);
    const recs = [
      ...pad.pointerDown(start.px, start.py),
      ...pad.pointerMove(end.px, end.py),
      ...pad.pointerUp(end.px, end.py),
    ].map((r) => JSON.parse(r));
    expect(recs.map((r) => r.phase)).toEqual(["down", "move", "up"]);
    expect(recs[0]).toMatchObject({ x: 2.0, y: 3.0 });
    expect(recs[1].x - recs[0].x).toBeCloseTo(10.5, 6);
    expect(recs[1].y - recs[0].y).toBeCloseTo(6.0, 6);
    expect(recs.every((r) => r.id === recs[0].id)).toBe(true);
  });

  it("shift-drag synthesizes a co-moving second contact 3 cm away", () => {
    const pad = new TrackpadEmulator(PANE);
    const start = cmToPane(PANE, 5.0, 4.0);
    const end = cmToPane(PANE, 5.0, 8.0);
    const down = pad.pointerDown(start.px, start.py, true).map((r) => JSON.parse(r));
    const move = pad.pointerMove(end.px, end.py).map((r) => JSON.parse(r));
    const up = pad.pointerUp(end.px, end.py).map((r) => JSON.parse(r));
    expect(down).toHaveLength(2);
    expect(down[1].x - down[0].x).toBeCloseTo(3.0, 9);
    expect(down[1].y).toBeCloseTo(down[0].y, 9);
    expect(move).toHaveLength(2);
    // both fingers moved the same +4 cm in y: a clean two-finger swipe
    expect(move[0].y - down[0].y).toBeCloseTo(4.0, 6);
    expect(move[1].y - down[1].y).toBeCloseTo(4.0, 6);
    expect(up.map((r) => r.phase)).toEqual(["up", "up"]);
  });

  it("bezel toggle plants and lifts a left-bezel contact", () => {
    const pad = new TrackpadEmulator(PANE);
    const down = pad.bezelDown(PANE.tabletHcm).map((r) => JSON.parse(r));
    expect(down).toHaveLength(1);
    expect(down[0].x).toBe(-1);
    expect(pad.bezelHeld).toBe(true);
    expect(pad.bezelDown(PANE.tabletHcm)).toEqual([]); // already held
    const up = pad.bezelUp(PANE.tabletHcm).map((r) => JSON.parse(r));
    expect(up[0].phase).toBe("up");
    expect(up[0].id).toBe(down[0].id);
    expect(pad.bezelUp(PANE.tabletHcm)).toEqual([]);
  });

  it("ignores moves with no active drag", () => {
    const pad = new TrackpadEmulator(PANE);
    expect(pad.pointerMove(10, 10)).toEqual([]);
    expect(pad.pointerUp(10, 10)).toEqual([]);
  });
});

describe("gaze emulation", () => {
  it("hovering a screen emits a ray towards the hovered point", () => {
    const gaze = new GazeEmulator();
    const scene = buildScene(snapshot, 960, 420);
    const p = uvToCanvas(scene, 8, 0.25, 0.75)!;
    const recs = gaze.sample(scene, snapshot, p.px, p.py).map((r) => JSON.parse(r));
    expect(recs).toHaveLength(1);
    expect(Math.hypot(recs[0].dx, recs[0].dy, recs[0].dz)).toBeCloseTo(1, 6);
    // ray towards screen 8 (to the right of center): negative world y
    expect(recs[0].dy).toBeLessThan(0);
  });

  it("emits nothing when frozen or off-screen", () => {
    const gaze = new GazeEmulator();
    const scene = buildScene(snapshot, 960, 420);
    expect(gaze.sample(scene, snapshot, 1, 1)).toEqual([]); // canvas corner: no screen
    gaze.mode = "frozen";
    const p = uvToCanvas(scene, 7, 0.5, 0.5)!;
    expect(gaze.sample(scene, snapshot, p.px, p.py)).toEqual([]);
  });
});

describe("lean emulation", () => {
  it("translates the anchor along its forward axis", () => {
    const rec = JSON.parse(leanRecord(snapshot, 12.0));
    expect(rec.type).toBe("head");
    expect(rec.px).toBeCloseTo(12.0, 6); // fixture anchor faces +x from origin
    expect(rec.py).toBeCloseTo(0.0, 6);
    expect(rec.qw).toBe(1);
  });
});
