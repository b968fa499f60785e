// Input emulation: pane pointer events become tablet contacts, pointer
// position over the scene becomes gaze rays, a slider becomes head lean.
//
// Two-finger swipes are emulated with a modifier (shift-drag): a second
// synthetic contact rides 3 cm to the right of the pointer and mirrors
// its motion, which satisfies the recognizer's separation and direction
// gates. A key toggle plants a contact on the left bezel for the
// bimanual clutch.

import { commandRecord, contactRecord, gazeRecord, headRecord, Snapshot } from "./protocol.js";
import { PaneGeometry, paneToCm } from "./scale.js";
import { gazeRayTo, pointToScreen, SceneLayout } from "./scene.js";

const TWO_FINGER_OFFSET_CM = 3.0;

export class TrackpadEmulator {
  private nextId = 1;
  private drag: { id: number; secondId: number | null } | null = null;
  private bezelId: number | null = null;

  constructor(public pane: PaneGeometry) {}

  pointerDown(px: number, py: number, twoFinger = false): string[] {
    if (this.drag !== null) return [];
    const { x, y } = paneToCm(this.pane, px, py);
    const id = this.nextId++;
    const records = [contactRecord(null, id, "down", x, y)];
    let secondId: number | null = null;
    if (twoFinger) {
      secondId = this.nextId++;
      records.push(contactRecord(null, secondId, "down", x + TWO_FINGER_OFFSET_CM, y));
    }
    this.drag = { id, secondId };
    return records;
  }

  pointerMove(px: number, py: number): string[] {
    if (this.drag === null) return [];
    const { x, y } = paneToCm(this.pane, px, py);
    const records = [contactRecord(null, this.drag.id, "move", x, y)];
    if (this.drag.secondId !== null) {
      records.push(
        contactRecord(null, this.drag.secondId, "move", x + TWO_FINGER_OFFSET_CM, y),
      );
    }
    return records;
  }

  pointerUp(px: number, py: number): string[] {
    if (this.drag === null) return [];
    const { x, y } = paneToCm(this.pane, px, py);
    const records = [contactRecord(null, this.drag.id, "up", x, y)];
    if (this.drag.secondId !== null) {
      records.push(contactRecord(null, this.drag.secondId, "up", x + TWO_FINGER_OFFSET_CM, y));
    }
    this.drag = null;
    return records;
  }

  get dragging(): boolean {
    return this.drag !== null;
  }

  bezelDown(tabletHcm: number): string[] {
    if (this.bezelId !== null) return [];
    this.bezelId = this.nextId++;
    return [contactRecord(null, this.bezelId, "down", -1.0, tabletHcm / 2)];
  }

  bezelUp(tabletHcm: number): string[] {
    if (this.bezelId === null) return [];
    const id = this.bezelId;
    this.bezelId = null;
    return [contactRecord(null, id, "up", -1.0, tabletHcm / 2)];
  }

  get bezelHeld(): boolean {
    return this.bezelId !== null;
  }
}

export type GazeMode = "pointer" | "frozen";

export class GazeEmulator {
  mode: GazeMode = "pointer";

  // pointer hovering over the scene canvas -> gaze ray at the hovered point
  sample(scene: SceneLayout, snapshot: Snapshot, px: number, py: number): string[] {
    if (this.mode === "frozen") return [];
    const hit = pointToScreen(scene, px, py);
    if (hit === null) return [];
    const ray = gazeRayTo(snapshot, hit.screenId, hit.u, hit.v);
    return [gazeRecord(null, ray.origin, ray.direction)];
  }
}

export function leanRecord(snapshot: Snapshot, leanCm: number): string {
  const a = snapshot.anchor;
  return headRecord(
    null,
    [a.px + a.fx * leanCm, a.py + a.fy * leanCm, a.pz + a.fz * leanCm],
    [a.qw, a.qx, a.qy, a.qz],
  );
}

export function layerCommand(name: "select_layer" | "toggle_visibility", index: number): string {
  return commandRecord(null, name, index);
}

export function plainCommand(
  name: "show_all" | "next" | "grab_override" | "release_override",
): string {
  return commandRecord(null, name, null);
}
