/** Wire protocol v1: typed mirrors of the server frames plus runtime checks. */

export interface HandStateMsg {
  holding: string | null;
  kind?: string;
}

export interface PlanMsg {
  symbols: string[];
  index: number;
}

export interface ObjectMsg {
  id: string;
  class: string;
  center: [number, number, number];
  half_extents: [number, number, number];
  contents: number | null;
  held: boolean;
}

export interface RectMsg {
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface FixationMsg {
  centroid: [number, number];
  start_t: number;
  duration: number;
  dispersion: number;
  dwell_fraction: number;
}

export interface EventMsg {
  t: number;
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface Snapshot {
  type: "snapshot";
  v: number;
  t: number;
  camera: { width: number; height: number };
  wrist: [number, number, number];
  roll: number;
  hand_state: HandStateMsg;
  plan: PlanMsg | null;
  objects: ObjectMsg[];
  bboxes: RectMsg[];
  intent_zones: RectMsg[];
  fixation: FixationMsg | null;
  magnet_on: boolean;
  elbow: [number, number, number];
  waypoints: [number, number, number][];
  last_events: EventMsg[];
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerFrame = Snapshot | ErrorFrame;

export interface GazeMessage {
  type: "gaze";
  t: number;
  u: number;
  v: number;
}

export class ProtocolError extends Error {}

function expectNumber(value: unknown, name: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ProtocolError(`${name} must be a finite number`);
  }
  return value;
}

export function parseServerFrame(raw: string): ServerFrame {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new ProtocolError("frame is not valid JSON");
  }
  if (typeof data !== "object" || data === null || !("type" in data)) {
    throw new ProtocolError("frame must be an object with a 'type' field");
  }
  const frame = data as Record<string, unknown>;
  if (frame.type === "error") {
    return { type: "error", message: String(frame.message ?? "unknown error") };
  }
  if (frame.type !== "snapshot") {
    throw new ProtocolError(`unknown frame type ${String(frame.type)}`);
  }
  if (frame.v !== 1) {
    throw new ProtocolError(`unsupported protocol version ${String(frame.v)}`);
  }
  expectNumber(frame.t, "t");
  for (const key of [
    "camera", "wrist", "roll", "hand_state", "objects", "bboxes",
    "intent_zones", "magnet_on", "elbow", "waypoints", "last_events",
  ]) {
    if (!(key in frame)) {
      throw new ProtocolError(`snapshot missing field '${key}'`);
    }
  }
  return frame as unknown as Snapshot;
}
