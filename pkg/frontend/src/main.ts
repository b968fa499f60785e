// Browser shell: wires the WebSocket, canvases and widgets together.
// Query parameters: ?host=127.0.0.1&port=8741&v=1

import { ClientSession } from "./client.js";
import {
  GazeEmulator,
  layerCommand,
  leanRecord,
  plainCommand,
  TrackpadEmulator,
} from "./input.js";
import { PROTOCOL_VERSION, Snapshot } from "./protocol.js";
import { render } from "./render.js";
import { buildScene, SceneLayout } from "./scene.js";
import { PaneGeometry, paneHeightPx } from "./scale.js";

// matches the engine's default 10.1-inch 16:10 tablet
const TABLET_W_CM = 21.754548;
const TABLET_H_CM = 13.596593;
const BEZEL_CM = 2.0;

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? window.location.hostname ?? "127.0.0.1";
const port = params.get("port") ?? window.location.port ?? "8000";
const version = params.get("v") ?? String(PROTOCOL_VERSION);

const sceneCanvas = document.getElementById("scene") as HTMLCanvasElement;
const paneCanvas = document.getElementById("pane") as HTMLCanvasElement;
const statusLine = document.getElementById("status") as HTMLElement;
const metricsLog = document.getElementById("metrics") as HTMLElement;
const layerPanel = document.getElementById("layers") as HTMLElement;
const leanSlider = document.getElementById("lean") as HTMLInputElement;
const gazeToggle = document.getElementById("gaze-mode") as HTMLInputElement;

const pane: PaneGeometry = {
  tabletWcm: TABLET_W_CM,
  tabletHcm: TABLET_H_CM,
  bezelCm: BEZEL_CM,
  widthPx: paneCanvas.width,
};
paneCanvas.height = Math.round(paneHeightPx(pane));

const trackpad = new TrackpadEmulator(pane);
const gaze = new GazeEmulator();
let scene: SceneLayout | null = null;

const session = new ClientSession({
  onSnapshot: (snap) => redraw(snap),
  onMetrics: (m) => {
    const line = document.createElement("div");
    line.textContent =
      `trial ${m.trial_id} [${m.condition}] tct=${m.tct_s.toFixed(2)}s` +
      (m.distance_cm !== null ? ` dist=${m.distance_cm.toFixed(2)}cm` : "") +
      (m.errors !== null ? ` errors=${m.errors}` : "");
    metricsLog.prepend(line);
  },
  onError: (reason) => setStatus(`server error: ${reason}`),
  onQueueChange: (pending) =>
    setStatus(pending > 0 ? `disconnected, ${pending} frame(s) buffered` : "connected"),
});

function setStatus(text: string): void {
  statusLine.textContent = text;
}

function redraw(snap: Snapshot): void {
  scene = buildScene(snap, sceneCanvas.width, sceneCanvas.height);
  render(sceneCanvas.getContext("2d")!, snap, scene);
  drawPane();
  rebuildLayerPanel(snap);
  setStatus(
    `rev ${snap.revision} · ${snap.technique}/${snap.mode}` +
    ` · screen ${snap.cursor.screen}` +
    ` (${snap.cursor.u.toFixed(3)}, ${snap.cursor.v.toFixed(3)})` +
    (snap.held ? ` · holding ${snap.held}` : "") +
    (snap.peek ? " · peek" : ""),
  );
}

function drawPane(): void {
  const ctx = paneCanvas.getContext("2d")!;
  const s = pane.widthPx / (TABLET_W_CM + 2 * BEZEL_CM);
  ctx.fillStyle = "#2b2417"; // bezel
  ctx.fillRect(0, 0, paneCanvas.width, paneCanvas.height);
  ctx.fillStyle = trackpad.bezelHeld ? "#4a3c1f" : "#1a1f27"; // active area
  ctx.fillRect(BEZEL_CM * s, 0, TABLET_W_CM * s, TABLET_H_CM * s);
  ctx.strokeStyle = "#555";
  ctx.strokeRect(BEZEL_CM * s, 0, TABLET_W_CM * s, TABLET_H_CM * s);
}

function rebuildLayerPanel(snap: Snapshot): void {
  layerPanel.innerHTML = "";
  if (!snap.layers) return;
  for (const entry of snap.layers.entries) {
    const row = document.createElement("div");
    row.className = "layer-row";
    const eye = document.createElement("button");
    eye.textContent = entry.visible ? "o" : "-";
    eye.title = `toggle visibility of layer ${entry.index}`;
    eye.onclick = () => session.send([layerCommand("toggle_visibility", entry.index)]);
    const select = document.createElement("button");
    select.textContent = `layer ${entry.index}`;
    select.className = entry.index === snap.layers!.active ? "active" : "";
    select.onclick = () => session.send([layerCommand("select_layer", entry.index)]);
    row.append(eye, select);
    layerPanel.append(row);
  }
}

// -- trackpad pane events ------------------------------------------------------

function panePos(ev: PointerEvent): { px: number; py: number } {
  const rect = paneCanvas.getBoundingClientRect();
  return { px: ev.clientX - rect.left, py: ev.clientY - rect.top };
}

paneCanvas.addEventListener("pointerdown", (ev) => {
  const { px, py } = panePos(ev);
  paneCanvas.setPointerCapture(ev.pointerId);
  session.send(trackpad.pointerDown(px, py, ev.shiftKey));
});
paneCanvas.addEventListener("pointermove", (ev) => {
  if (!trackpad.dragging) return;
  const { px, py } = panePos(ev);
  session.send(trackpad.pointerMove(px, py));
});
paneCanvas.addEventListener("pointerup", (ev) => {
  const { px, py } = panePos(ev);
  session.send(trackpad.pointerUp(px, py));
});

// hold B for the bezel clutch (bimanual coarse switching)
window.addEventListener("keydown", (ev) => {
  if (ev.key === "b" && !ev.repeat) {
    session.send(trackpad.bezelDown(TABLET_H_CM));
    drawPane();
  }
});
window.addEventListener("keyup", (ev) => {
  if (ev.key === "b") {
    session.send(trackpad.bezelUp(TABLET_H_CM));
    drawPane();
  }
});

// -- gaze from the pointer over the scene ---------------------------------------

let lastGazeSent = 0;
sceneCanvas.addEventListener("pointermove", (ev) => {
  if (!scene || !session.latest) return;
  const now = performance.now();
  if (now - lastGazeSent < 40) return; // ~25 Hz is plenty
  lastGazeSent = now;
  const rect = sceneCanvas.getBoundingClientRect();
  session.send(
    gaze.sample(scene, session.latest, ev.clientX - rect.left, ev.clientY - rect.top),
  );
});

gazeToggle.addEventListener("change", () => {
  gaze.mode = gazeToggle.checked ? "pointer" : "frozen";
});

leanSlider.addEventListener("input", () => {
  if (!session.latest) return;
  session.send([leanRecord(session.latest, Number(leanSlider.value))]);
});

// -- buttons ----------------------------------------------------------------------

(document.getElementById("show-all") as HTMLButtonElement).onclick = () =>
  session.send([plainCommand("show_all")]);
(document.getElementById("next") as HTMLButtonElement).onclick = () =>
  session.send([plainCommand("next")]);
(document.getElementById("grab") as HTMLButtonElement).onclick = () =>
  session.send([plainCommand("grab_override")]);
(document.getElementById("release") as HTMLButtonElement).onclick = () =>
  session.send([plainCommand("release_override")]);
(document.getElementById("download") as HTMLButtonElement).onclick = async () => {
  const text = await session.requestTrace();
  const blob = new Blob([text], { type: "text/plain" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "session.trace";
  a.click();
  URL.revokeObjectURL(a.href);
};

// -- connection ---------------------------------------------------------------------

const ws = new WebSocket(`ws://${host}:${port}/ws?v=${version}`);
ws.onopen = () => {
  session.attach({ send: (text) => ws.send(text) });
  setStatus("connected");
};
ws.onmessage = (ev) => session.handleMessage(String(ev.data));
ws.onclose = () => {
  session.detach();
  setStatus("disconnected");
};
drawPane();
