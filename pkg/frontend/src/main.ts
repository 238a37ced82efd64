// Boot: fetch static config, open the state stream, then run a single
// render loop. All world data is server-sent; the page never simulates.

import { paintScene } from "./canvas.js";
import { GatewayClient } from "./gateway.js";
import {
  bindCommandPanel,
  bindManualPanel,
  bindTimingsPanel,
  renderActivity,
  renderEntryTimer,
  renderEvents,
  renderExchange,
  renderHeader,
  renderManualGating,
  renderSnapshots,
} from "./panels.js";
import { applyStream, initialState } from "./state.js";
import { TimingTracker } from "./timing.js";
import type { StreamMessage, WorldSnapshot } from "./types.js";

async function boot(): Promise<void> {
  const client = new GatewayClient();
  const view = initialState();
  const commandTiming = new TimingTracker();
  const manualTiming = new TimingTracker();

  const [backends, config, flat] = await Promise.all([
    client.backends(),
    client.sceneConfig(),
    client.state(),
  ]);

  // seed the view from the REST snapshot; the stream takes over after
  const seeded = flat as unknown as WorldSnapshot & {
    events?: StreamMessage["events"];
    activity?: StreamMessage["activity"];
  };
  applyStream(view, {
    type: "state",
    state: {
      tick: seeded.tick,
      robots: seeded.robots,
      objects: seeded.objects,
      regions: seeded.regions,
      snapshots: seeded.snapshots,
    },
    events: seeded.events ?? [],
    events_dropped: 0,
    activity: seeded.activity ?? {},
  });

  const backendSelect = document.getElementById("backend-select") as HTMLSelectElement;
  for (const name of backends.backends) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    opt.selected = name === backends.default;
    backendSelect.appendChild(opt);
  }
  view.selectedBackend = backends.default;

  const scope = document.getElementById("robot-scope") as HTMLSelectElement;
  const manualSelect = document.getElementById("manual-robot") as HTMLSelectElement;
  for (const robot of config.robots) {
    for (const select of [scope, manualSelect]) {
      const opt = document.createElement("option");
      opt.value = robot.id;
      opt.textContent = `${robot.id} (${robot.kind})`;
      select.appendChild(opt);
    }
  }
  view.selectedRobot = config.robots[0]?.id ?? null;
  manualSelect.value = view.selectedRobot ?? "";

  const deps = { client, view, config, commandTiming, manualTiming, repaint };
  bindCommandPanel(deps);
  bindManualPanel(deps);
  bindTimingsPanel(client);
  renderManualGating(deps);

  let dirty = true;
  function repaint(): void {
    dirty = true;
  }

  client.openStateStream(
    2,
    (msg) => {
      applyStream(view, msg);
      dirty = true;
    },
    (connected) => {
      view.connected = connected;
      renderHeader(view);
    },
  );

  const canvas = document.getElementById("scene-canvas") as HTMLCanvasElement;
  function frame(): void {
    if (dirty) {
      dirty = false;
      paintScene(canvas, view);
      renderHeader(view);
      renderActivity(view);
      renderEvents(view);
      renderSnapshots(view);
      renderExchange(view);
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);

  setInterval(() => renderEntryTimer(view, commandTiming), 250);
}

boot().catch((err) => {
  document.body.insertAdjacentHTML(
    "afterbegin",
    `<div class="card" style="margin:12px;color:#f85149">gateway unreachable: ${String(err)}</div>`,
  );
});
