/** Coordinate mapping between panels, camera pixels, and the world top-down view. */

import type { Snapshot } from "./protocol.js";

export interface PanelSize {
  width: number;
  height: number;
}

/** Egocentric panel coordinates -> camera pixel coordinates. */
export function panelToCamera(
  x: number,
  y: number,
  panel: PanelSize,
  camera: PanelSize,
): { u: number; v: number } {
  return { u: (x * camera.width) / panel.width, v: (y * camera.height) / panel.height };
}

/** Camera pixel coordinates -> egocentric panel coordinates. */
export function cameraToPanel(
  u: number,
  v: number,
  panel: PanelSize,
  camera: PanelSize,
): { x: number; y: number } {
  return { x: (u * panel.width) / camera.width, y: (v * panel.height) / camera.height };
}

export function insidePanel(x: number, y: number, panel: PanelSize): boolean {
  return x >= 0 && y >= 0 && x < panel.width && y < panel.height;
}

/** Top-down world window derived from the table footprint plus a margin. */
export interface WorldWindow {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function worldWindowFor(snapshot: Snapshot, margin = 0.25): WorldWindow {
  const table = snapshot.objects.find((o) => o.class === "Table");
  if (!table) {
    return { xMin: -1, xMax: 1, yMin: -1, yMax: 1 };
  }
  return {
    xMin: table.center[0] - table.half_extents[0] - margin,
    xMax: table.center[0] + table.half_extents[0] + margin,
    yMin: table.center[1] - table.half_extents[1] - margin,
    yMax: table.center[1] + table.half_extents[1] + margin,
  };
}

/** World (x, y) -> top-down panel pixels; world +x up the panel, +y to the left. */
export function worldToPanel(
  wx: number,
  wy: number,
  window: WorldWindow,
  panel: PanelSize,
): { x: number; y: number } {
  const sx = (window.yMax - wy) / (window.yMax - window.yMin);
  const sy = (window.xMax - wx) / (window.xMax - window.xMin);
  return { x: sx * panel.width, y: sy * panel.height };
}

/** Pointer sampler: turns the latest pointer position into gaze messages.
 *
 * The pointer is the gaze surrogate; positions outside the panel emit
 * nothing. Sampling is driven externally (render loop or timer) at >= 30 Hz.
 */
export class GazePointer {
  private position: { x: number; y: number } | null = null;

  constructor(
    private panel: PanelSize,
    private camera: PanelSize,
  ) {}

  setPanel(panel: PanelSize, camera: PanelSize) {
    this.panel = panel;
    this.camera = camera;
  }

  setPosition(x: number, y: number) {
    this.position = { x, y };
  }

  clearPosition() {
    this.position = null;
  }

  get current(): { x: number; y: number } | null {
    return this.position;
  }

  /** One gaze message for the current pointer position, or null when outside. */
  sample(nowSeconds: number): { type: "gaze"; t: number; u: number; v: number } | null {
    if (this.position === null || !insidePanel(this.position.x, this.position.y, this.panel)) {
      return null;
    }
    const { u, v } = panelToCamera(this.position.x, this.position.y, this.panel, this.camera);
    return { type: "gaze", t: nowSeconds, u, v };
  }
}
