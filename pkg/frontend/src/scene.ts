// Flattened (unrolled-arc) scene projection.
//
// Screens live on a cylinder around the anchor; the view unrolls that
// cylinder onto the canvas: horizontal position follows the azimuth
// relative to the anchor's forward direction (positive azimuth = left),
// vertical position follows height. One scale (px per cm at the arc
// radius) keeps u and v isotropic inside each screen rectangle.

import { AnchorInfo, ScreenInfo, Snapshot } from "./protocol.js";

export interface ScreenRect {
  id: number;
  x: number; // left edge, canvas px
  y: number; // top edge, canvas px
  w: number;
  h: number;
}

export interface SceneLayout {
  rects: ScreenRect[];
  pxPerCm: number;
  canvasW: number;
  canvasH: number;
}

const MARGIN_PX = 12;

function normalizeAngle(a: number): number {
  while (a > Math.PI) a -= 2 * Math.PI;
  while (a <= -Math.PI) a += 2 * Math.PI;
  return a;
}

function screenGeometry(anchor: AnchorInfo, s: ScreenInfo) {
  const yaw0 = Math.atan2(anchor.fy, anchor.fx);
  const az = normalizeAngle(
    Math.atan2(s.cy - anchor.py, s.cx - anchor.px) - yaw0,
  );
  const radius = Math.hypot(s.cx - anchor.px, s.cy - anchor.py);
  const z = s.cz - anchor.pz;
  return { az, radius, z };
}

export function buildScene(snapshot: Snapshot, canvasW: number, canvasH: number): SceneLayout {
  const anchor = snapshot.anchor;
  const geos = snapshot.screens.map((s) => ({ s, g: screenGeometry(anchor, s) }));
  // extents in "arc cm": x = -az * radius (so +azimuth renders left), y = z
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const { s, g } of geos) {
    const cx = -g.az * g.radius;
    minX = Math.min(minX, cx - s.w_cm / 2);
    maxX = Math.max(maxX, cx + s.w_cm / 2);
    minY = Math.min(minY, g.z - s.h_cm / 2);
    maxY = Math.max(maxY, g.z + s.h_cm / 2);
  }
  const scale = Math.min(
    (canvasW - 2 * MARGIN_PX) / (maxX - minX),
    (canvasH - 2 * MARGIN_PX) / (maxY - minY),
  );
  const offX = (canvasW - (maxX - minX) * scale) / 2;
  const offY = (canvasH - (maxY - minY) * scale) / 2;
  const rects = geos.map(({ s, g }) => {
    const cx = -g.az * g.radius;
    return {
      id: s.id,
      x: offX + (cx - s.w_cm / 2 - minX) * scale,
      y: offY + (maxY - (g.z + s.h_cm / 2)) * scale,
      w: s.w_cm * scale,
      h: s.h_cm * scale,
    };
  });
  return { rects, pxPerCm: scale, canvasW, canvasH };
}

export interface ScreenPoint {
  screenId: number;
  u: number;
  v: number;
}

export function pointToScreen(scene: SceneLayout, px: number, py: number): ScreenPoint | null {
  for (const r of scene.rects) {
    if (px >= r.x && px <= r.x + r.w && py >= r.y && py <= r.y + r.h) {
      return {
        screenId: r.id,
        u: (px - r.x) / r.w,
        v: 1 - (py - r.y) / r.h,
      };
    }
  }
  return null;
}

export function uvToCanvas(scene: SceneLayout, screenId: number, u: number, v: number) {
  const r = scene.rects.find((x) => x.id === screenId);
  if (!r) return null;
  return { px: r.x + u * r.w, py: r.y + (1 - v) * r.h };
}

// World-space point of (u, v) on a screen, for synthesizing gaze rays.
export function worldPoint(
  snapshot: Snapshot, screenId: number, u: number, v: number,
): [number, number, number] {
  const s = snapshot.screens.find((x) => x.id === screenId);
  if (!s) throw new Error(`unknown screen ${screenId}`);
  const du = (u - 0.5) * s.w_cm;
  const dv = (v - 0.5) * s.h_cm;
  return [
    s.cx + du * s.rx + dv * s.ux,
    s.cy + du * s.ry + dv * s.uy,
    s.cz + du * s.rz + dv * s.uz,
  ];
}

export function gazeRayTo(
  snapshot: Snapshot, screenId: number, u: number, v: number,
): { origin: [number, number, number]; direction: [number, number, number] } {
  const a = snapshot.anchor;
  const p = worldPoint(snapshot, screenId, u, v);
  const d: [number, number, number] = [p[0] - a.px, p[1] - a.py, p[2] - a.pz];
  const n = Math.hypot(d[0], d[1], d[2]);
  return { origin: [a.px, a.py, a.pz], direction: [d[0] / n, d[1] / n, d[2] / n] };
}
