/** Display strings for hand state, plans, and events.
 *
 * Everything here derives from server-sent data only; the same formatters are
 * used to cross-check snapshots against the event log in tests.
 */

import type { EventMsg, HandStateMsg, PlanMsg } from "./protocol.js";

const KIND_LABELS: Record<string, string> = {
  NonContainer: "non-container",
  SmallContainer: "small container",
  LargeContainer: "large container",
  Surface: "surface",
};

export function handStateLabel(hand: HandStateMsg): string {
  if (hand.holding === null) {
    return "hand: empty";
  }
  const kind = hand.kind !== undefined ? KIND_LABELS[hand.kind] ?? hand.kind : "?";
  return `hand: holding ${hand.holding} (${kind})`;
}

/** Plan strip with the current symbol bracketed, e.g. "reach(orange) [grasp(orange)]". */
export function planLabel(plan: PlanMsg | null): string {
  if (plan === null) {
    return "plan: idle";
  }
  const parts = plan.symbols.map((s, i) => (i === plan.index ? `[${s}]` : s));
  return `plan: ${parts.join(" ")}`;
}

export function eventLabel(event: EventMsg): string {
  const p = event.payload;
  switch (event.kind) {
    case "intent":
      return `intent ${String(p.object_id)} (${String(p.status)})`;
    case "parse":
      return p.result === "plan"
        ? `plan ${(p.symbols as string[]).join(" ")}`
        : `reject ${String(p.reason)}`;
    case "feedback": {
      const cause = p.cause ? ` (${String(p.cause)})` : "";
      return `${String(p.action)} ${String(p.outcome)}${cause}`;
    }
    case "safety":
      return "SAFETY RELEASE";
    case "state_change":
      return handStateLabel(p as unknown as HandStateMsg);
    default:
      return event.kind;
  }
}

/** The most recent event worth surfacing in the status bar. */
export function lastNotableEvent(events: EventMsg[]): EventMsg | null {
  for (let i = events.length - 1; i >= 0; i--) {
    const e = events[i]!;
    if (e.kind !== "gaze_sample" && e.kind !== "fixation") {
      return e;
    }
  }
  return null;
}

export interface FoldedState {
  hand: HandStateMsg;
  plan: PlanMsg | null;
}

/** Reconstruct hand state and active plan purely from logged events.
 *
 * Used to verify that what the UI displays from snapshots agrees with the
 * event log at every point in time.
 */
export function foldEvents(events: EventMsg[], initial?: FoldedState): FoldedState {
  const state: FoldedState = initial ?? { hand: { holding: null }, plan: null };
  for (const event of events) {
    const p = event.payload;
    switch (event.kind) {
      case "state_change":
        state.hand = p as unknown as HandStateMsg;
        break;
      case "parse":
        if (p.result === "plan") {
          state.plan = { symbols: [...(p.symbols as string[])], index: 0 };
        }
        break;
      case "feedback":
        if (state.plan !== null) {
          if (p.outcome === "success") {
            state.plan.index += 1;
            if (state.plan.index >= state.plan.symbols.length) {
              state.plan = null;
            }
          } else {
            state.plan = null;
          }
        }
        break;
      case "safety":
        state.plan = null;
        break;
    }
  }
  return state;
}
