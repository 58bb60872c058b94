/** Canvas rendering: egocentric view with overlays, top-down scene, status bar.
 *
 * All geometry comes straight from the latest snapshot (bboxes and intent
 * zones are server-reported rectangles, never recomputed here); the only
 * client-side additions are the pointer cursor, dwell ring, and wrist trail.
 */

import { isStale } from "./client.js";
import type { ConnectionStatus } from "./client.js";
import { eventLabel, handStateLabel, lastNotableEvent, planLabel } from "./format.js";
import { cameraToPanel, worldToPanel, worldWindowFor } from "./mapping.js";
import type { PanelSize } from "./mapping.js";
import type { EventMsg, Snapshot } from "./protocol.js";

export interface ViewState {
  snapshot: Snapshot | null;
  lastSnapshotAtMs: number | null;
  status: ConnectionStatus;
  pointer: { x: number; y: number } | null;
  lastEvent: EventMsg | null;
  wristTrail: [number, number, number][];
  lastError: string | null;
}

export function newViewState(): ViewState {
  return {
    snapshot: null,
    lastSnapshotAtMs: null,
    status: "disconnected",
    pointer: null,
    lastEvent: null,
    wristTrail: [],
    lastError: null,
  };
}

export function updateViewState(view: ViewState, snapshot: Snapshot, nowMs: number) {
  view.snapshot = snapshot;
  view.lastSnapshotAtMs = nowMs;
  const notable = lastNotableEvent(snapshot.last_events);
  if (notable !== null) {
    view.lastEvent = notable;
  }
  view.wristTrail.push(snapshot.wrist);
  if (view.wristTrail.length > 600) {
    view.wristTrail.splice(0, view.wristTrail.length - 600);
  }
}

const COLORS = {
  background: "#101418",
  bbox: "#4fc3f7",
  zone: "rgba(255, 193, 7, 0.35)",
  zoneEdge: "#ffc107",
  gaze: "#ff5252",
  fixation: "#b2ff59",
  table: "#37474f",
  object: "#90caf9",
  held: "#ffd54f",
  elbow: "#ce93d8",
  wrist: "#69f0ae",
  waypoint: "#ffab40",
  text: "#eceff1",
};

export function drawEgocentric(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  panel: PanelSize,
  nowMs: number,
) {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, panel.width, panel.height);
  const snap = view.snapshot;
  if (snap === null) {
    ctx.fillStyle = COLORS.text;
    ctx.font = "14px monospace";
    ctx.fillText("waiting for snapshot...", 12, 24);
    return;
  }
  const cam = snap.camera;

  ctx.font = "11px monospace";
  for (const bbox of snap.bboxes) {
    const a = cameraToPanel(bbox.x, bbox.y, panel, cam);
    const b = cameraToPanel(bbox.x + bbox.w, bbox.y + bbox.h, panel, cam);
    ctx.strokeStyle = COLORS.bbox;
    ctx.lineWidth = 1;
    ctx.strokeRect(a.x, a.y, b.x - a.x, b.y - a.y);
    ctx.fillStyle = COLORS.bbox;
    ctx.fillText(bbox.id, a.x + 2, a.y - 3);
  }
  for (const zone of snap.intent_zones) {
    const a = cameraToPanel(zone.x, zone.y, panel, cam);
    const b = cameraToPanel(zone.x + zone.w, zone.y + zone.h, panel, cam);
    ctx.fillStyle = COLORS.zone;
    ctx.fillRect(a.x, a.y, b.x - a.x, b.y - a.y);
    ctx.strokeStyle = COLORS.zoneEdge;
    ctx.strokeRect(a.x, a.y, b.x - a.x, b.y - a.y);
  }

  if (snap.fixation !== null) {
    const c = cameraToPanel(snap.fixation.centroid[0], snap.fixation.centroid[1], panel, cam);
    ctx.strokeStyle = COLORS.fixation;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(c.x, c.y, 10, 0, 2 * Math.PI);
    ctx.stroke();
    // dwell progress ring fills clockwise from the top
    ctx.beginPath();
    ctx.arc(c.x, c.y, 14, -Math.PI / 2, -Math.PI / 2 + 2 * Math.PI * snap.fixation.dwell_fraction);
    ctx.strokeStyle = COLORS.zoneEdge;
    ctx.lineWidth = 3;
    ctx.stroke();
  }

  if (view.pointer !== null) {
    ctx.strokeStyle = COLORS.gaze;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(view.pointer.x - 8, view.pointer.y);
    ctx.lineTo(view.pointer.x + 8, view.pointer.y);
    ctx.moveTo(view.pointer.x, view.pointer.y - 8);
    ctx.lineTo(view.pointer.x, view.pointer.y + 8);
    ctx.stroke();
  }

  if (isStale(nowMs, view.lastSnapshotAtMs)) {
    ctx.fillStyle = "#ff8a65";
    ctx.font = "bold 13px monospace";
    ctx.fillText("STALE", panel.width - 58, 20);
  }
  if (!snap.magnet_on) {
    ctx.fillStyle = "rgba(183, 28, 28, 0.55)";
    ctx.fillRect(0, 0, panel.width, panel.height);
    ctx.fillStyle = "#ffffff";
    ctx.font = "bold 22px monospace";
    ctx.fillText("SAFETY RELEASE - MAGNET OFF", panel.width / 2 - 170, panel.height / 2);
  }
}

export function drawTopDown(ctx: CanvasRenderingContext2D, view: ViewState, panel: PanelSize) {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, panel.width, panel.height);
  const snap = view.snapshot;
  if (snap === null) {
    return;
  }
  const window = worldWindowFor(snap);
  const toPanel = (wx: number, wy: number) => worldToPanel(wx, wy, window, panel);

  ctx.font = "11px monospace";
  for (const obj of snap.objects) {
    const center = toPanel(obj.center[0], obj.center[1]);
    const corner = toPanel(obj.center[0] + obj.half_extents[0], obj.center[1] + obj.half_extents[1]);
    const hw = Math.abs(corner.x - center.x);
    const hh = Math.abs(corner.y - center.y);
    if (obj.class === "Table") {
      ctx.fillStyle = COLORS.table;
      ctx.fillRect(center.x - hw, center.y - hh, 2 * hw, 2 * hh);
      continue;
    }
    ctx.fillStyle = obj.held ? COLORS.held : COLORS.object;
    ctx.fillRect(center.x - hw, center.y - hh, 2 * hw, 2 * hh);
    ctx.fillText(obj.id, center.x + hw + 2, center.y);
  }

  if (view.wristTrail.length > 1) {
    ctx.strokeStyle = "rgba(105, 240, 174, 0.4)";
    ctx.lineWidth = 1;
    ctx.beginPath();
    const first = toPanel(view.wristTrail[0]![0], view.wristTrail[0]![1]);
    ctx.moveTo(first.x, first.y);
    for (const w of view.wristTrail) {
      const p = toPanel(w[0], w[1]);
      ctx.lineTo(p.x, p.y);
    }
    ctx.stroke();
  }

  for (const wp of snap.waypoints) {
    const p = toPanel(wp[0], wp[1]);
    ctx.strokeStyle = COLORS.waypoint;
    ctx.strokeRect(p.x - 3, p.y - 3, 6, 6);
  }

  const elbow = toPanel(snap.elbow[0], snap.elbow[1]);
  ctx.fillStyle = COLORS.elbow;
  ctx.beginPath();
  ctx.arc(elbow.x, elbow.y, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.fillText("elbow", elbow.x + 7, elbow.y);

  const wrist = toPanel(snap.wrist[0], snap.wrist[1]);
  ctx.fillStyle = COLORS.wrist;
  ctx.beginPath();
  ctx.arc(wrist.x, wrist.y, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = COLORS.wrist;
  ctx.beginPath();
  ctx.moveTo(elbow.x, elbow.y);
  ctx.lineTo(wrist.x, wrist.y);
  ctx.stroke();
}

export function statusLine(view: ViewState): string {
  const parts: string[] = [`[${view.status}]`];
  const snap = view.snapshot;
  if (snap !== null) {
    parts.push(`t=${snap.t.toFixed(2)}s`);
    parts.push(handStateLabel(snap.hand_state));
    parts.push(planLabel(snap.plan));
    parts.push(snap.magnet_on ? "magnet: on" : "MAGNET RELEASED");
  }
  if (view.lastEvent !== null) {
    parts.push(`last: ${eventLabel(view.lastEvent)}`);
  }
  if (view.lastError !== null) {
    parts.push(`error: ${view.lastError}`);
  }
  return parts.join("  |  ");
}
