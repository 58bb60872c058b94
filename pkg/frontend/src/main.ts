/** Browser bootstrap: wire the socket, pointer, and render loop together. */

import { SimClient } from "./client.js";
import { GazePointer, insidePanel } from "./mapping.js";
import { drawEgocentric, drawTopDown, newViewState, statusLine, updateViewState } from "./render.js";

const GAZE_RATE_HZ = 60;

function query(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

function main() {
  const host = query("host", "127.0.0.1");
  const port = query("port", "8765");
  const egoCanvas = document.getElementById("egocentric") as HTMLCanvasElement;
  const topCanvas = document.getElementById("topdown") as HTMLCanvasElement;
  const statusBar = document.getElementById("status") as HTMLDivElement;
  const egoCtx = egoCanvas.getContext("2d")!;
  const topCtx = topCanvas.getContext("2d")!;

  const view = newViewState();
  const panel = { width: egoCanvas.width, height: egoCanvas.height };
  const pointer = new GazePointer(panel, panel);

  const client = new SimClient(`ws://${host}:${port}`, {
    factory: (url) => new WebSocket(url) as never,
    onSnapshot: (snapshot) => {
      updateViewState(view, snapshot, Date.now());
      pointer.setPanel(panel, snapshot.camera);
    },
    onServerError: (message) => {
      view.lastError = message;
    },
    onStatus: (status) => {
      view.status = status;
    },
  });
  client.connect();

  egoCanvas.addEventListener("pointermove", (ev) => {
    const rect = egoCanvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) * panel.width) / rect.width;
    const y = ((ev.clientY - rect.top) * panel.height) / rect.height;
    if (insidePanel(x, y, panel)) {
      pointer.setPosition(x, y);
      view.pointer = { x, y };
    } else {
      pointer.clearPosition();
      view.pointer = null;
    }
  });
  egoCanvas.addEventListener("pointerleave", () => {
    pointer.clearPosition();
    view.pointer = null;
  });

  setInterval(() => {
    const message = pointer.sample(Date.now() / 1000);
    if (message !== null) {
      client.send(message);
    }
  }, 1000 / GAZE_RATE_HZ);

  const resetButton = document.getElementById("reset") as HTMLButtonElement;
  resetButton.addEventListener("click", () => {
    client.send({ type: "reset" });
    view.wristTrail = [];
    view.lastEvent = null;
    view.lastError = null;
  });

  function frame() {
    const nowMs = Date.now();
    drawEgocentric(egoCtx, view, panel, nowMs);
    drawTopDown(topCtx, view, { width: topCanvas.width, height: topCanvas.height });
    statusBar.textContent = statusLine(view);
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
