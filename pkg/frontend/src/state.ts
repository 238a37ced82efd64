// View state: everything the page renders, fed exclusively by server
// messages. No client-side motion prediction; a reload plus the next
// snapshot reproduces the same picture.

import type {
  ActivityMap,
  CommandReply,
  EventView,
  StreamMessage,
  WorldSnapshot,
} from "./types.js";

export const EVENT_RING = 200;
export const TRAIL_POINTS = 400;

const TERMINAL = new Set(["completed", "fault", "timeout"]);

export interface PendingExchange {
  commandId: string | null;
  text: string;
  status: string; // executing | completed | fault | timeout | parse_failed | ...
  script: string;
  plan: string;
  prompt: string;
  error: string | null;
  errorLine: number | null;
  latencyS: number | null;
  robots: string[];
  remaining: Set<string>; // robots still running this command
}

export interface ViewState {
  snapshot: WorldSnapshot | null;
  activity: ActivityMap;
  events: EventView[]; // ring, newest last
  eventsDropped: number;
  trails: Map<string, { x: number; y: number }[]>;
  selectedRobot: string | null;
  selectedBackend: string | null;
  pending: PendingExchange | null;
  connected: boolean;
}

export function initialState(): ViewState {
  return {
    snapshot: null,
    activity: {},
    events: [],
    eventsDropped: 0,
    trails: new Map(),
    selectedRobot: null,
    selectedBackend: null,
    pending: null,
    connected: false,
  };
}

function pushRing<T>(ring: T[], items: T[], cap: number): T[] {
  const merged = ring.concat(items);
  return merged.length > cap ? merged.slice(merged.length - cap) : merged;
}

function extendTrails(view: ViewState, snapshot: WorldSnapshot): void {
  for (const robot of snapshot.robots) {
    let trail = view.trails.get(robot.id);
    if (!trail) {
      trail = [];
      view.trails.set(robot.id, trail);
    }
    const last = trail[trail.length - 1];
    if (!last || last.x !== robot.x || last.y !== robot.y) {
      trail.push({ x: robot.x, y: robot.y });
      if (trail.length > TRAIL_POINTS) {
        trail.splice(0, trail.length - TRAIL_POINTS);
      }
    }
  }
}

/** Fold one stream message into the view. Mutates in place; the render
 * loop repaints afterwards. */
export function applyStream(view: ViewState, msg: StreamMessage): void {
  if (msg.type === "state" && msg.state) {
    view.snapshot = msg.state;
    view.activity = msg.activity ?? view.activity;
    if (msg.events && msg.events.length > 0) {
      view.events = pushRing(view.events, msg.events, EVENT_RING);
    }
    view.eventsDropped += msg.events_dropped ?? 0;
    extendTrails(view, msg.state);
    reconcilePending(view);
  } else if (msg.type === "status" && msg.finished) {
    const pending = view.pending;
    if (!pending || pending.status !== "executing") return;
    for (const row of msg.finished) {
      if (row.command === pending.commandId) {
        pending.remaining.delete(row.robot);
        if (row.status !== "completed") pending.status = row.status;
      }
    }
    if (pending.remaining.size === 0 && pending.status === "executing") {
      pending.status = "completed";
    }
  }
}

/** Settle an executing command against the activity table. Status only
 * moves forward; a later command reusing the robot never flips it back. */
export function reconcilePending(view: ViewState): void {
  const pending = view.pending;
  if (!pending || pending.status !== "executing" || pending.commandId === null) return;
  let sawTerminalFault: string | null = null;
  for (const rid of pending.robots) {
    const row = view.activity[rid];
    if (!row || row.command !== pending.commandId) continue; // superseded or unknown
    if (row.status === "running") return; // still going
    pending.remaining.delete(rid);
    if (TERMINAL.has(row.status) && row.status !== "completed") {
      sawTerminalFault = row.status;
    }
  }
  if (pending.remaining.size === 0) {
    pending.status = sawTerminalFault ?? "completed";
  }
}

/** Record the gateway's reply to a submitted command as the pending
 * exchange (prompt hidden behind a disclosure, script shown). */
export function recordCommandReply(
  view: ViewState,
  text: string,
  reply: CommandReply,
): void {
  view.pending = {
    commandId: reply.command_id ?? null,
    text,
    status: reply.status,
    script: reply.script ?? "",
    plan: reply.plan ?? "",
    prompt: reply.prompt ?? "",
    error: reply.error ?? null,
    errorLine: reply.error_line ?? null,
    latencyS: reply.latency_s ?? null,
    robots: reply.robots ?? [],
    remaining: new Set(reply.robots ?? []),
  };
}
