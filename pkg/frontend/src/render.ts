// Canvas renderer for snapshots: the unrolled screen arc, cursor, items,
// task widgets and layer depth offsets. Pure draw code; all interaction
// state lives on the server.

import { ItemInfo, Snapshot } from "./protocol.js";
import { SceneLayout, uvToCanvas } from "./scene.js";

const CURSOR_DIAMETER_CM = 2.5;

const COLORS = {
  background: "#10141a",
  screen: "#1d2633",
  screenEdge: "#3c4a5e",
  activeEdge: "#38d070",
  cursor: "#ff5d5d",
  disk: "#4da3ff",
  target: "#38d070",
  piece: "#e0b84d",
  template: "#8a93a3",
  text: "#aeb7c4",
};

export function render(
  ctx: CanvasRenderingContext2D, snapshot: Snapshot, scene: SceneLayout,
): void {
  ctx.clearRect(0, 0, scene.canvasW, scene.canvasH);
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, scene.canvasW, scene.canvasH);

  for (const rect of scene.rects) {
    const screen = snapshot.screens.find((s) => s.id === rect.id)!;
    drawLayersBehind(ctx, snapshot, rect);
    ctx.fillStyle = COLORS.screen;
    ctx.fillRect(rect.x, rect.y, rect.w, rect.h);
    ctx.lineWidth = screen.active ? 3 : 1;
    ctx.strokeStyle = screen.active ? COLORS.activeEdge : COLORS.screenEdge;
    ctx.strokeRect(rect.x, rect.y, rect.w, rect.h);
    ctx.fillStyle = COLORS.text;
    ctx.font = "10px sans-serif";
    ctx.fillText(String(screen.id), rect.x + 4, rect.y + 12);
  }

  drawTask(ctx, snapshot, scene);
  for (const item of snapshot.items) drawItem(ctx, snapshot, scene, item);
  drawCursor(ctx, snapshot, scene);
}

function drawLayersBehind(
  ctx: CanvasRenderingContext2D, snapshot: Snapshot, rect: { x: number; y: number; w: number; h: number; id: number },
): void {
  const layers = snapshot.layers;
  const screen = snapshot.screens.find((s) => s.id === rect.id)!;
  if (!layers || !screen.active) return;
  // depth becomes a lateral ghost offset (deeper = further right)
  const entries = [...layers.entries].sort((a, b) => b.z_cm - a.z_cm);
  for (const entry of entries) {
    if (!entry.visible || entry.z_cm === 0) continue;
    const off = entry.z_cm * scenePxPerCm(rect, screen) * 0.3;
    ctx.globalAlpha = entry.transparent ? 0.15 : 0.35;
    ctx.fillStyle = COLORS.screenEdge;
    ctx.fillRect(rect.x + off, rect.y - off, rect.w, rect.h);
  }
  ctx.globalAlpha = 1;
}

function scenePxPerCm(rect: { w: number }, screen: { w_cm: number }): number {
  return rect.w / screen.w_cm;
}

function drawCursor(ctx: CanvasRenderingContext2D, snapshot: Snapshot, scene: SceneLayout): void {
  const c = snapshot.cursor;
  const pos = uvToCanvas(scene, c.screen, c.u, c.v);
  const rect = scene.rects.find((r) => r.id === c.screen);
  const screen = snapshot.screens.find((s) => s.id === c.screen);
  if (!pos || !rect || !screen) return;
  const radius = (CURSOR_DIAMETER_CM / 2) * scenePxPerCm(rect, screen);
  ctx.beginPath();
  ctx.arc(pos.px, pos.py, radius, 0, 2 * Math.PI);
  ctx.strokeStyle = COLORS.cursor;
  ctx.lineWidth = 2;
  ctx.stroke();
}

function drawItem(
  ctx: CanvasRenderingContext2D, snapshot: Snapshot, scene: SceneLayout, item: ItemInfo,
): void {
  // in aligned view, items on non-active layers are hidden behind the
  // active plane; keep them visible but dimmed when their layer is
  const layers = snapshot.layers;
  let alpha = 1.0;
  if (item.layer !== null && layers) {
    const entry = layers.entries[item.layer];
    if (!entry.visible) return;
    if (entry.transparent) alpha = 0.25;
    else if (item.layer !== layers.active) alpha = 0.6;
  }
  const pos = uvToCanvas(scene, item.screen, item.u, item.v);
  const rect = scene.rects.find((r) => r.id === item.screen);
  const screen = snapshot.screens.find((s) => s.id === item.screen);
  if (!pos || !rect || !screen) return;
  const radius = item.radius_cm * scenePxPerCm(rect, screen);
  ctx.globalAlpha = alpha;
  ctx.beginPath();
  ctx.arc(pos.px, pos.py, radius, 0, 2 * Math.PI);
  ctx.fillStyle = item.id.startsWith("piece") ? COLORS.piece : COLORS.disk;
  ctx.fill();
  if (item.held) {
    ctx.strokeStyle = COLORS.cursor;
    ctx.lineWidth = 2;
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
}

function drawTask(ctx: CanvasRenderingContext2D, snapshot: Snapshot, scene: SceneLayout): void {
  const task = snapshot.task;
  if (!task) return;
  if (task.kind === "transfer" && task.trial) {
    const t = task.trial;
    const pos = uvToCanvas(scene, t.target_screen, t.target_u, t.target_v);
    const rect = scene.rects.find((r) => r.id === t.target_screen);
    const screen = snapshot.screens.find((s) => s.id === t.target_screen);
    if (!pos || !rect || !screen) return;
    const radius = (t.target_diameter_cm / 2) * scenePxPerCm(rect, screen);
    ctx.beginPath();
    ctx.arc(pos.px, pos.py, radius, 0, 2 * Math.PI);
    ctx.strokeStyle = COLORS.target;
    ctx.setLineDash([4, 3]);
    ctx.lineWidth = 2;
    ctx.stroke();
    ctx.setLineDash([]);
  }
  if (task.kind === "puzzle" && task.grid && task.template_uv && task.screen !== undefined) {
    const rect = scene.rects.find((r) => r.id === task.screen);
    const screen = snapshot.screens.find((s) => s.id === task.screen);
    if (!rect || !screen) return;
    const s = scenePxPerCm(rect, screen);
    const gw = task.grid.columns * task.grid.cell_cm * s;
    const gh = task.grid.rows * task.grid.cell_cm * s;
    const gx = rect.x + rect.w / 2 - gw / 2;
    const gy = rect.y + rect.h / 2 - gh / 2;
    ctx.strokeStyle = COLORS.template;
    ctx.lineWidth = 0.5;
    for (let c = 0; c <= task.grid.columns; c++) {
      ctx.beginPath();
      ctx.moveTo(gx + c * task.grid.cell_cm * s, gy);
      ctx.lineTo(gx + c * task.grid.cell_cm * s, gy + gh);
      ctx.stroke();
    }
    for (let r = 0; r <= task.grid.rows; r++) {
      ctx.beginPath();
      ctx.moveTo(gx, gy + r * task.grid.cell_cm * s);
      ctx.lineTo(gx + gw, gy + r * task.grid.cell_cm * s);
      ctx.stroke();
    }
    // template marks: where each piece belongs
    for (const [u, v] of task.template_uv) {
      const p = uvToCanvas(scene, task.screen, u, v);
      if (!p) continue;
      ctx.strokeStyle = COLORS.target;
      ctx.strokeRect(p.px - 4, p.py - 4, 8, 8);
    }
  }
}
