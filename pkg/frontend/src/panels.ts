// DOM wiring for the three panel columns. Pure logic lives in the
// sibling modules; this file reads inputs, posts requests, and writes
// results back into the page.

import { clampJog, clampJoint, enabledControls } from "./capabilities.js";
import type { GatewayClient } from "./gateway.js";
import type { ViewState } from "./state.js";
import { recordCommandReply } from "./state.js";
import { displayScript, scriptLines, statusLabel } from "./script.js";
import { TimingTracker } from "./timing.js";
import type { RobotConfigView, SceneConfig } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface PanelDeps {
  client: GatewayClient;
  view: ViewState;
  config: SceneConfig;
  commandTiming: TimingTracker;
  manualTiming: TimingTracker;
  repaint: () => void;
}

// -- command panel ---------------------------------------------------------

export function bindCommandPanel(deps: PanelDeps): void {
  const text = el<HTMLTextAreaElement>("command-text");
  const backendSelect = el<HTMLSelectElement>("backend-select");
  const scope = el<HTMLSelectElement>("robot-scope");
  const send = el<HTMLButtonElement>("send-button");

  text.addEventListener("input", () => deps.commandTiming.markInput());
  backendSelect.addEventListener("change", () => {
    deps.view.selectedBackend = backendSelect.value;
  });

  send.addEventListener("click", () => {
    void (async () => {
      const instruction = text.value.trim();
      if (!instruction) return;
      send.disabled = true;
      try {
        const stamps = deps.commandTiming.consume();
        const body: Record<string, unknown> = {
          text: instruction,
          session: "console",
          ...stamps,
        };
        if (deps.view.selectedBackend) body.backend = deps.view.selectedBackend;
        if (scope.value) body.robots = [scope.value];
        const reply = await deps.client.submitCommand(body);
        recordCommandReply(deps.view, instruction, reply);
      } catch (err) {
        recordCommandReply(deps.view, instruction, {
          status: "rejected",
          error: err instanceof Error ? err.message : String(err),
        });
        // transport failure: keep the input so the user can resend
      }
      send.disabled = false;
      renderExchange(deps.view);
      deps.repaint();
    })();
  });
}

export function renderExchange(view: ViewState): void {
  const box = el<HTMLDivElement>("exchange");
  const pending = view.pending;
  if (!pending) {
    box.classList.add("hidden");
    return;
  }
  box.classList.remove("hidden");

  const pill = el<HTMLSpanElement>("exchange-status");
  pill.textContent = statusLabel(pending);
  pill.className = "pill";
  if (pending.status === "executing") pill.classList.add("busy");
  else if (pending.status === "completed") pill.classList.add("ok");
  else pill.classList.add("bad");

  el<HTMLSpanElement>("exchange-latency").textContent =
    pending.latencyS === null ? "" : `backend ${pending.latencyS.toFixed(3)}s`;

  const pane = el<HTMLPreElement>("script-pane");
  pane.innerHTML = scriptLines(displayScript(pending), pending.errorLine)
    .map((line) => {
      const body = `<span class="line-no">${line.lineNo
        .toString()
        .padStart(2)}</span>  ${escapeHtml(line.text)}`;
      return line.isError ? `<span class="error-line">${body}</span>` : body;
    })
    .join("\n");

  el<HTMLPreElement>("prompt-pane").textContent = pending.prompt;
}

export function renderEntryTimer(view: ViewState, timing: TimingTracker): void {
  const label = el<HTMLSpanElement>("entry-timer");
  const elapsed = timing.elapsed();
  label.textContent = elapsed === null ? "" : `entry ${elapsed.toFixed(1)}s`;
}

// -- manual panel ------------------------------------------------------------

function robotConfig(config: SceneConfig, id: string | null): RobotConfigView | null {
  return config.robots.find((r) => r.id === id) ?? null;
}

export function bindManualPanel(deps: PanelDeps): void {
  const select = el<HTMLSelectElement>("manual-robot");
  const ack = el<HTMLSpanElement>("manual-ack");

  const post = (body: Record<string, unknown>) => {
    const robot = deps.view.selectedRobot;
    if (!robot) return;
    void (async () => {
      try {
        const reply = await deps.client.manual(robot, {
          session: "console",
          ...deps.manualTiming.consume(),
          ...body,
        });
        ack.textContent =
          reply.status === "accepted"
            ? `accepted${reply.call ? `: ${reply.call}` : ""}`
            : `rejected: ${reply.error ?? "unknown"}`;
      } catch (err) {
        ack.textContent = `transport error: ${err instanceof Error ? err.message : err}`;
      }
    })();
  };

  select.addEventListener("change", () => {
    deps.view.selectedRobot = select.value;
    renderManualGating(deps);
    deps.repaint();
  });

  // base jog: hold the button, jog requests repeat until release
  const vx = el<HTMLInputElement>("jog-vx");
  const vy = el<HTMLInputElement>("jog-vy");
  const omega = el<HTMLInputElement>("jog-omega");
  for (const [slider, label] of [
    [vx, "jog-vx-value"],
    [vy, "jog-vy-value"],
    [omega, "jog-omega-value"],
  ] as const) {
    slider.addEventListener("input", () => {
      deps.manualTiming.markInput();
      el<HTMLSpanElement>(label).textContent = Number(slider.value).toFixed(2);
    });
  }

  const jogButton = el<HTMLButtonElement>("jog-button");
  let jogTimer: ReturnType<typeof setInterval> | null = null;
  const sendJog = () => {
    const cfg = robotConfig(deps.config, deps.view.selectedRobot);
    if (!cfg) return;
    const jog = clampJog(
      {
        vx: Number(vx.value),
        vy: Number(vy.value),
        omega: Number(omega.value),
        duration: 0.5,
      },
      cfg,
      deps.config.jog_duration_max_s,
    );
    post({ action: "base_jog", ...jog });
  };
  const stopJog = () => {
    if (jogTimer !== null) clearInterval(jogTimer);
    jogTimer = null;
  };
  jogButton.addEventListener("pointerdown", () => {
    deps.manualTiming.markInput();
    sendJog();
    jogTimer = setInterval(sendJog, 400);
  });
  jogButton.addEventListener("pointerup", stopJog);
  jogButton.addEventListener("pointerleave", stopJog);

  // arm joints
  el<HTMLButtonElement>("arm-apply").addEventListener("click", () => {
    const cfg = robotConfig(deps.config, deps.view.selectedRobot);
    if (!cfg) return;
    const joints = currentJointValues(cfg);
    post({ action: "arm_set", joints });
  });
  el<HTMLButtonElement>("preset-fold").addEventListener("click", () =>
    post({ action: "arm_preset", name: "fold" }),
  );
  el<HTMLButtonElement>("preset-extend").addEventListener("click", () =>
    post({ action: "arm_preset", name: "extend" }),
  );

  el<HTMLButtonElement>("gripper-open").addEventListener("click", () =>
    post({ action: "gripper", state: "open" }),
  );
  el<HTMLButtonElement>("gripper-close").addEventListener("click", () =>
    post({ action: "gripper", state: "close" }),
  );
  el<HTMLButtonElement>("capture-button").addEventListener("click", () =>
    post({ action: "capture_photo" }),
  );
}

function currentJointValues(cfg: RobotConfigView): number[] {
  const sliders = document.querySelectorAll<HTMLInputElement>("#joint-sliders input");
  const joints: number[] = [];
  sliders.forEach((slider, i) => {
    joints.push(clampJoint(Number(slider.value), i, cfg.joint_limits));
  });
  return joints;
}

/** Rebuild joint sliders for the selected robot and enable or disable
 * each fieldset from its capabilities. Disabled fieldsets grey out all
 * controls inside, which is the "capability mismatch" rendering. */
export function renderManualGating(deps: PanelDeps): void {
  const cfg = robotConfig(deps.config, deps.view.selectedRobot);
  if (!cfg) return;
  const controls = enabledControls(cfg.kind);
  el<HTMLFieldSetElement>("jog-fieldset").disabled = !controls.has("base_jog");
  el<HTMLFieldSetElement>("arm-fieldset").disabled = !controls.has("arm_set");
  el<HTMLFieldSetElement>("gripper-fieldset").disabled = !controls.has("gripper");
  el<HTMLFieldSetElement>("camera-fieldset").disabled = !controls.has("capture_photo");
  el<HTMLSpanElement>("manual-robot-label").textContent = cfg.kind;

  const holder = el<HTMLDivElement>("joint-sliders");
  holder.innerHTML = "";
  if (!cfg.has_arm) return;
  const snapshotRobot = deps.view.snapshot?.robots.find((r) => r.id === cfg.id);
  cfg.joint_limits.forEach((pair, i) => {
    const [lo, hi] = pair;
    const label = document.createElement("label");
    const value = snapshotRobot?.joints[i] ?? 0;
    label.innerHTML = `j${i + 1} <input type="range" min="${lo}" max="${hi}" step="1"
      value="${clampJoint(value, i, cfg.joint_limits)}">
      <span class="muted">[${lo}, ${hi}]</span>`;
    const slider = label.querySelector("input");
    slider?.addEventListener("input", () => deps.manualTiming.markInput());
    holder.appendChild(label);
  });
}

// -- right column ------------------------------------------------------------

export function renderSnapshots(view: ViewState): void {
  const holder = el<HTMLDivElement>("snapshot-cards");
  const snapshots = view.snapshot?.snapshots ?? [];
  holder.innerHTML = snapshots
    .slice()
    .reverse()
    .map((s) => {
      const rows = s.entries
        .map(
          (e) =>
            `<tr><td>${escapeHtml(e.object)}</td><td>${e.range.toFixed(2)} m</td>` +
            `<td>${e.bearing.toFixed(1)}&deg;</td></tr>`,
        )
        .join("");
      return (
        `<div class="snapshot-card"><strong>${escapeHtml(s.robot)}</strong>` +
        ` photo at tick ${s.tick} (${s.entries.length} object${s.entries.length === 1 ? "" : "s"})` +
        `<table><thead><tr><th>object</th><th>range</th><th>bearing</th></tr></thead>` +
        `<tbody>${rows}</tbody></table></div>`
      );
    })
    .join("");
}

export function renderEvents(view: ViewState): void {
  const feed = el<HTMLUListElement>("event-feed");
  feed.innerHTML = view.events
    .slice()
    .reverse()
    .map(
      (e) =>
        `<li><span class="muted">${e.tick}</span> ${escapeHtml(e.robot)} ` +
        `${escapeHtml(e.kind)}${e.payload ? `: ${escapeHtml(e.payload)}` : ""}</li>`,
    )
    .join("");
  el<HTMLSpanElement>("events-dropped").textContent =
    view.eventsDropped > 0 ? `(${view.eventsDropped} dropped)` : "";
}

export function renderActivity(view: ViewState): void {
  const body = el<HTMLTableElement>("activity-table").querySelector("tbody");
  if (!body) return;
  body.innerHTML = Object.entries(view.activity)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(
      ([rid, row]) =>
        `<tr><td>${escapeHtml(rid)}</td><td>${escapeHtml(row.status)}</td>` +
        `<td>${escapeHtml(row.command ?? "")}</td>` +
        `<td>${row.calls_completed}/${row.calls_total}</td></tr>`,
    )
    .join("");
}

export function bindTimingsPanel(client: GatewayClient): void {
  const refresh = el<HTMLButtonElement>("timings-refresh");
  const body = el<HTMLTableElement>("timings-table").querySelector("tbody");
  refresh.addEventListener("click", () => {
    void (async () => {
      if (!body) return;
      const { timings } = await client.timings();
      body.innerHTML = timings
        .map(
          (t) =>
            `<tr><td>${escapeHtml(t.mode)}</td><td>${escapeHtml(t.command_id)}</td>` +
            `<td>${t.operation_seconds === null ? "" : t.operation_seconds.toFixed(3)}</td></tr>`,
        )
        .join("");
    })();
  });
}

export function renderHeader(view: ViewState): void {
  const pill = el<HTMLSpanElement>("conn-pill");
  pill.textContent = view.connected ? "live" : "disconnected";
  pill.className = `pill ${view.connected ? "ok" : "off"}`;
  el<HTMLSpanElement>("tick-label").textContent = view.snapshot
    ? `tick ${view.snapshot.tick}`
    : "";
}
