/** WebSocket client with reconnect and a short outbound buffer.
 *
 * The UI holds no simulation state: the latest snapshot is the only truth,
 * so reconnecting reproduces an identical display from the next frame.
 */

import { parseServerFrame, ProtocolError } from "./protocol.js";
import type { ServerFrame, Snapshot } from "./protocol.js";

type WebSocketLike = {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
};

export type WebSocketFactory = (url: string) => WebSocketLike;

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ClientOptions {
  factory: WebSocketFactory;
  onSnapshot?: (snapshot: Snapshot) => void;
  onServerError?: (message: string) => void;
  onStatus?: (status: ConnectionStatus) => void;
  reconnectDelayMs?: number;
  bufferWindowMs?: number;
  now?: () => number;
}

const OPEN = 1;

export class SimClient {
  latest: Snapshot | null = null;
  lastSnapshotAtMs: number | null = null;
  status: ConnectionStatus = "disconnected";

  private ws: WebSocketLike | null = null;
  private buffer: { atMs: number; data: string }[] = [];
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(
    private url: string,
    private opts: ClientOptions,
  ) {}

  private get now(): number {
    return (this.opts.now ?? Date.now)();
  }

  connect() {
    this.closed = false;
    this.setStatus("connecting");
    const ws = this.opts.factory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.setStatus("connected");
      this.flushBuffer();
    };
    ws.onmessage = (ev) => this.handleFrame(String(ev.data));
    ws.onerror = () => {};
    ws.onclose = () => {
      this.ws = null;
      this.setStatus("disconnected");
      if (!this.closed) {
        this.scheduleReconnect();
      }
    };
  }

  close() {
    this.closed = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.ws?.close();
    this.ws = null;
  }

  /** Send a message now, or buffer it briefly while disconnected. */
  send(message: object) {
    const data = JSON.stringify(message);
    if (this.ws !== null && this.ws.readyState === OPEN) {
      this.ws.send(data);
      return;
    }
    this.buffer.push({ atMs: this.now, data });
    this.pruneBuffer();
  }

  private handleFrame(raw: string) {
    let frame: ServerFrame;
    try {
      frame = parseServerFrame(raw);
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.opts.onServerError?.(err.message);
        return;
      }
      throw err;
    }
    if (frame.type === "error") {
      this.opts.onServerError?.(frame.message);
      return;
    }
    this.latest = frame;
    this.lastSnapshotAtMs = this.now;
    this.opts.onSnapshot?.(frame);
  }

  private flushBuffer() {
    this.pruneBuffer();
    for (const entry of this.buffer) {
      this.ws?.send(entry.data);
    }
    this.buffer = [];
  }

  private pruneBuffer() {
    const windowMs = this.opts.bufferWindowMs ?? 1000;
    const cutoff = this.now - windowMs;
    this.buffer = this.buffer.filter((entry) => entry.atMs >= cutoff);
  }

  private scheduleReconnect() {
    const delay = this.opts.reconnectDelayMs ?? 1000;
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      if (!this.closed) {
        this.connect();
      }
    }, delay);
  }

  private setStatus(status: ConnectionStatus) {
    this.status = status;
    this.opts.onStatus?.(status);
  }
}

export function isStale(nowMs: number, lastSnapshotAtMs: number | null, thresholdMs = 500): boolean {
  return lastSnapshotAtMs === null || nowMs - lastSnapshotAtMs > thresholdMs;
}
