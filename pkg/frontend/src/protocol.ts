// Record grammar shared with the session server: newline-delimited JSON
// records inside WebSocket text frames. Numbers are written with six
// decimals to match the engine's wire resolution; events may omit "t"
// (the server stamps arrival time).

export const PROTOCOL_VERSION = 1;

export interface AnchorInfo {
  px: number; py: number; pz: number;
  qw: number; qx: number; qy: number; qz: number;
  fx: number; fy: number; fz: number;
}

export interface ScreenInfo {
  id: number; col: number; row: number;
  cx: number; cy: number; cz: number;
  rx: number; ry: number; rz: number;
  ux: number; uy: number; uz: number;
  w_cm: number; h_cm: number;
  active: boolean;
}

export interface ItemInfo {
  id: string;
  screen: number;
  layer: number | null;
  u: number; v: number;
  radius_cm: number;
  held: boolean;
}

export interface LayerEntry {
  index: number; z_cm: number; visible: boolean; transparent: boolean;
}

export interface LayersInfo {
  active: number;
  view: string;
  collapsed: boolean;
  spacing_cm: number;
  swipe_accum_cm: number;
  entries: LayerEntry[];
}

export interface TransferTrialInfo {
  index: number;
  start_screen: number; start_slot: number; start_u: number; start_v: number;
  target_screen: number; target_slot: number; target_u: number; target_v: number;
  disk_diameter_cm: number; target_diameter_cm: number;
}

export interface TaskInfo {
  kind: "transfer" | "puzzle";
  condition: string;
  total?: number;
  completed?: number;
  disk?: string;
  trial?: TransferTrialInfo | null;
  screen?: number;
  layers?: number;
  grid?: { columns: number; rows: number; cell_cm: number };
  template?: [number, number][];
  template_uv?: [number, number][];
  cells?: [number, number][];
  scored?: boolean;
}

export interface Snapshot {
  type: "snapshot";
  revision: number;
  t: number;
  technique: string;
  clutch: string;
  mode: string;
  anchor: AnchorInfo;
  screens: ScreenInfo[];
  cursor: { screen: number; u: number; v: number };
  held: string | null;
  items: ItemInfo[];
  layers: LayersInfo | null;
  peek: boolean;
  task: TaskInfo | null;
}

export interface MetricsRecord {
  type: "metrics";
  trial_id: number;
  condition: string;
  tct_s: number;
  distance_cm: number | null;
  errors: number | null;
}

export interface ErrorRecord {
  type: "error";
  reason: string;
  server_version?: number;
}

export interface TraceRecord {
  type: "trace";
  text: string;
}

export type ServerMessage = Snapshot | MetricsRecord | ErrorRecord | TraceRecord;

export function parseServerMessage(text: string): ServerMessage {
  const obj = JSON.parse(text);
  if (
    obj.type !== "snapshot" && obj.type !== "metrics" &&
    obj.type !== "error" && obj.type !== "trace"
  ) {
    throw new Error(`unexpected server record type ${obj.type}`);
  }
  return obj as ServerMessage;
}

export function fmt6(x: number): string {
  if (!isFinite(x)) throw new Error(`non-finite value: ${x}`);
  const s = x.toFixed(6);
  return s === "-0.000000" ? "0.000000" : s;
}

export type ContactPhase = "down" | "move" | "up";

function withT(fields: string[], t: number | null): string[] {
  return t === null ? fields : [`"t":${fmt6(t)}`, ...fields];
}

export function contactRecord(
  t: number | null, id: number, phase: ContactPhase, xCm: number, yCm: number,
): string {
  const fields = withT(
    [`"id":${id}`, `"phase":"${phase}"`, `"x":${fmt6(xCm)}`, `"y":${fmt6(yCm)}`], t,
  );
  return `{"type":"contact",${fields.join(",")}}`;
}

export function gazeRecord(
  t: number | null,
  origin: [number, number, number],
  direction: [number, number, number],
): string {
  const n = Math.hypot(direction[0], direction[1], direction[2]);
  const d = direction.map((c) => c / n);
  const fields = withT(
    [
      `"ox":${fmt6(origin[0])}`, `"oy":${fmt6(origin[1])}`, `"oz":${fmt6(origin[2])}`,
      `"dx":${fmt6(d[0])}`, `"dy":${fmt6(d[1])}`, `"dz":${fmt6(d[2])}`,
    ],
    t,
  );
  return `{"type":"gaze",${fields.join(",")}}`;
}

export function headRecord(
  t: number | null,
  position: [number, number, number],
  quat: [number, number, number, number],
): string {
  const fields = withT(
    [
      `"px":${fmt6(position[0])}`, `"py":${fmt6(position[1])}`, `"pz":${fmt6(position[2])}`,
      `"qw":${fmt6(quat[0])}`, `"qx":${fmt6(quat[1])}`,
      `"qy":${fmt6(quat[2])}`, `"qz":${fmt6(quat[3])}`,
    ],
    t,
  );
  return `{"type":"head",${fields.join(",")}}`;
}

export function commandRecord(t: number | null, name: string, value: number | null = null): string {
  const fields = withT([`"name":"${name}"`, `"value":${value === null ? "null" : value}`], t);
  return `{"type":"command",${fields.join(",")}}`;
}

export const DOWNLOAD_TRACE = `{"type":"download_trace"}`;
