"""Service layer: a live stepped world behind HTTP and WebSocket endpoints.

One background thread owns the engine and is the only writer. Request
handlers talk to it through an ordered mailbox drained at tick boundaries;
planner calls run on the request thread so they never stall the loop.
"""

from __future__ import annotations

import csv
import io
import itertools
import queue
import threading
import time
from concurrent.futures import Future
from dataclasses import dataclass
from typing import Optional

from .actions import MultiRobotPlan, ParseError, parse_script, pretty_print_plan
from .engine import BindError, Engine, event_to_dict, snapshot_to_dict
from .planner import Backend, BackendUnreachable, EmptyReply, plan
from .world import JointVector, Scene

MAX_EVENTS_PER_PUSH = 500
MAX_JOG_DURATION_S = 2.0

DISCRETE_MANUAL_CALLS = {
    "open": "openGripper()",
    "close": "closeGripper()",
}


@dataclass
class SessionTiming:
    session: str
    command_id: str
    mode: str  # manual | natural_language
    input_started_at: Optional[float]
    submitted_at: Optional[float]
    server_received_at: float
    task: Optional[str] = None

    @property
    def operation_seconds(self) -> Optional[float]:
        # both stamps must come from the client clock; never fabricate
        if self.input_started_at is None or self.submitted_at is None:
            return None
        return max(0.0, self.submitted_at - self.input_started_at)


class _Subscriber:
    """One streaming consumer. Latest-wins queue so slow readers never
    stall the loop; coalesced messages keep all events up to a cap."""

    def __init__(self, every_n: int):
        self.every_n = max(1, every_n)
        self.queue: queue.Queue = queue.Queue(maxsize=1)
        self.event_cursor = 0
        self.alive = True

    def push(self, message: dict):
        while True:
            try:
                self.queue.put_nowait(message)
                return
            except queue.Full:
                try:
                    stale = self.queue.get_nowait()
                except queue.Empty:
                    continue
                merged_events = stale.get("events", []) + message.get("events", [])
                dropped = stale.get("events_dropped", 0) + message.get("events_dropped", 0)
                if len(merged_events) > MAX_EVENTS_PER_PUSH:
                    dropped += len(merged_events) - MAX_EVENTS_PER_PUSH
                    merged_events = merged_events[-MAX_EVENTS_PER_PUSH:]
                # newest fields win, but never lose a state snapshot to a
                # thinner status message
                merged = dict(stale)
                merged.update(message)
                merged["events"] = merged_events
                merged["events_dropped"] = dropped
                if "state" in merged:
                    merged["type"] = "state"
                message = merged


class SimService:
    """Owns the step loop; every world mutation funnels through its mailbox."""

    def __init__(
        self,
        scene: Scene,
        backends: dict,
        default_backend: str,
        realtime: bool = True,
        speed: float = 1.0,
    ):
        if default_backend not in backends:
            raise ValueError(f"default backend {default_backend!r} not configured")
        if speed <= 0:
            raise ValueError("speed must be positive")
        self.backends = dict(backends)
        self.default_backend = default_backend
        self.realtime = realtime
        self.speed = speed
        self.engine = Engine(scene)
        self._mailbox: queue.Queue = queue.Queue()
        self._subscribers: list[_Subscriber] = []
        self._sub_lock = threading.Lock()
        self._timings: list[SessionTiming] = []
        self._command_log: list[dict] = []
        self._command_ids = itertools.count(1)
        self._robot_command: dict = {}  # robot id -> command id currently executing
        self._prev_busy: set = set()
        self._running = False
        self._thread: Optional[threading.Thread] = None

    # -- loop ------------------------------------------------------------------

    def start(self):
        if self._running:
            return
        self._running = True
        self._thread = threading.Thread(target=self._loop, name="sim-loop", daemon=True)
        self._thread.start()

    def stop(self):
        self._running = False
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def _loop(self):
        period = self.engine.dt / self.speed
        deadline = time.monotonic()
        while self._running:
            self._drain_mailbox()
            self.engine.step()
            self._publish()
            if self.realtime:
                deadline += period
                delay = deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                else:
                    deadline = time.monotonic()  # fell behind; don't bank a sprint

    def _drain_mailbox(self):
        while True:
            try:
                fn, future = self._mailbox.get_nowait()
            except queue.Empty:
                return
            try:
                result = fn()
            except BaseException as exc:  # hand the failure to the caller
                future.set_exception(exc)
            else:
                future.set_result(result)

    def _on_loop(self, fn, timeout: float = 10.0):
        """Run fn on the loop thread at the next tick boundary."""
        if not self._running:
            # headless/test mode: no loop thread, execute inline
            return fn()
        future: Future = Future()
        self._mailbox.put((fn, future))
        return future.result(timeout=timeout)

    def _publish(self):
        tick = self.engine.world.tick
        done_transitions = self._collect_finished()
        with self._sub_lock:
            subs = list(self._subscribers)
        if not subs:
            return
        log = self.engine.world.event_log
        for sub in subs:
            if not sub.alive:
                continue
            if done_transitions:
                sub.push({"type": "status", "tick": tick, "finished": done_transitions})
            if tick % sub.every_n != 0:
                continue
            events = [event_to_dict(e) for e in log[sub.event_cursor :]]
            sub.event_cursor = len(log)
            dropped = 0
            if len(events) > MAX_EVENTS_PER_PUSH:
                dropped = len(events) - MAX_EVENTS_PER_PUSH
                events = events[-MAX_EVENTS_PER_PUSH:]
            sub.push(
                {
                    "type": "state",
                    "state": self.engine.state_dict(),
                    "events": events,
                    "events_dropped": dropped,
                    "activity": self.activity(),
                }
            )
        with self._sub_lock:
            self._subscribers = [s for s in self._subscribers if s.alive]

    def _collect_finished(self) -> list:
        busy = self.engine.busy_robots()
        finished = []
        for rid in sorted(self._prev_busy - busy):
            ex = self.engine._execs.get(rid)
            finished.append(
                {
                    "robot": rid,
                    "command": self._robot_command.get(rid),
                    "status": ex.status.value if ex else "completed",
                }
            )
        self._prev_busy = busy
        return finished

    def activity(self) -> dict:
        out = {}
        for rid, ex in self.engine._execs.items():
            out[rid] = {
                "status": ex.status.value,
                "command": self._robot_command.get(rid),
                "calls_completed": ex.calls_completed,
                "calls_total": len(ex.calls),
            }
        return out

    # -- commands ---------------------------------------------------------------

    def _record_timing(
        self,
        command_id: str,
        mode: str,
        payload: dict,
    ):
        self._timings.append(
            SessionTiming(
                session=payload.get("session", "default"),
                command_id=command_id,
                mode=mode,
                input_started_at=payload.get("client_input_started_at"),
                submitted_at=payload.get("client_submitted_at"),
                server_received_at=time.time(),
                task=payload.get("task"),
            )
        )

    def submit_command(self, payload: dict) -> dict:
        """NL command: plan on this thread, bind on the loop thread."""
        text = (payload.get("text") or "").strip()
        if not text:
            return {"status": "rejected", "error": "empty command text"}
        robots = payload.get("robots") or self.engine.scene.robot_ids()
        backend_name = payload.get("backend") or self.default_backend
        backend: Optional[Backend] = self.backends.get(backend_name)
        if backend is None:
            return {"status": "rejected", "error": f"unknown backend {backend_name!r}"}
        command_id = f"cmd-{next(self._command_ids)}"
        self._record_timing(command_id, "natural_language", payload)

        try:
            exchange = plan(text, self.engine.scene, robots, backend)
        except (BackendUnreachable, EmptyReply) as exc:
            return {
                "command_id": command_id,
                "status": "backend_error",
                "error": str(exc),
                "backend": backend_name,
            }

        base = {
            "command_id": command_id,
            "backend": backend_name,
            "latency_s": exchange.latency_s,
            "script": exchange.extracted,
            "prompt": exchange.prompt,
        }
        if exchange.parse_error is not None:
            err = exchange.parse_error
            return {
                **base,
                "status": "parse_failed",
                "error": str(err),
                "error_line": err.line,
            }

        def bind():
            bound = self.engine.bind_plan(exchange.plan)
            for rid in bound:
                self._robot_command[rid] = command_id
            return bound

        try:
            bound = self._on_loop(bind)
        except BindError as exc:
            return {**base, "status": "bind_failed", "error": str(exc)}
        self._command_log.append(
            {"id": command_id, "kind": "command", "text": text, "robots": bound}
        )
        return {
            **base,
            "status": "executing",
            "robots": bound,
            "plan": pretty_print_plan(exchange.plan),
        }

    def manual_control(self, robot_id: str, payload: dict) -> dict:
        """Teleop action; validated here, applied on the loop thread."""
        action = payload.get("action")
        command_id = f"man-{next(self._command_ids)}"
        self._record_timing(command_id, "manual", payload)
        try:
            result = self._apply_manual(robot_id, action, payload, command_id)
        except (BindError, ParseError, ValueError, KeyError) as exc:
            return {"command_id": command_id, "status": "rejected", "error": str(exc)}
        self._command_log.append(
            {"id": command_id, "kind": f"manual:{action}", "robots": [robot_id]}
        )
        return {"command_id": command_id, "status": "accepted", **result}

    def _apply_manual(self, robot_id: str, action, payload: dict, command_id: str) -> dict:
        if action == "base_jog":
            duration = float(payload.get("duration", 0.5))
            if not (0 < duration <= MAX_JOG_DURATION_S):
                raise ValueError(f"jog duration must be in (0, {MAX_JOG_DURATION_S}] s")
            vx = float(payload.get("vx", 0.0))
            vy = float(payload.get("vy", 0.0))
            omega = float(payload.get("omega", 0.0))

            def jog():
                self.engine.start_jog(robot_id, vx, vy, omega, duration)
                self._robot_command[robot_id] = command_id

            self._on_loop(jog)
            return {"mode": "jog", "duration": duration}

        if action == "capture_photo":
            def shoot():
                record = self.engine.capture_snapshot(robot_id)
                self._robot_command[robot_id] = command_id
                return snapshot_to_dict(record)

            return {"snapshot": self._on_loop(shoot)}

        # remaining actions become one-call scripts through the normal binder
        script = None
        if action == "base_move":
            call_text = (payload.get("call") or "").strip()
            script = parse_script(call_text)
            if len(script.calls) != 1:
                raise ValueError("base_move takes exactly one call")
        elif action == "arm_set":
            joints = JointVector(tuple(float(v) for v in payload["joints"]))
            args = ", ".join(f"{v:g}" for v in joints)
            script = parse_script(f"moveArmSequential({args})")
        elif action == "arm_preset":
            name = payload.get("name", "")
            if name not in ("fold", "extend"):
                raise ValueError(f"unknown preset {name!r}")
            script = parse_script("presetFold()" if name == "fold" else "presetExtend()")
        elif action == "gripper":
            state = payload.get("state", "")
            if state not in DISCRETE_MANUAL_CALLS:
                raise ValueError("gripper state must be open or close")
            script = parse_script(DISCRETE_MANUAL_CALLS[state])
        else:
            raise ValueError(f"unknown manual action {action!r}")

        single = MultiRobotPlan(scripts={robot_id: script})

        def bind():
            bound = self.engine.bind_plan(single)
            for rid in bound:
                self._robot_command[rid] = command_id
            return bound

        self._on_loop(bind)
        return {"call": str(script.calls[0])}

    # -- observation ---------------------------------------------------------------

    def state(self, events_tail: int = 50) -> dict:
        def read():
            out = self.engine.state_dict()
            log = self.engine.world.event_log
            out["events"] = [event_to_dict(e) for e in log[-events_tail:]]
            out["activity"] = self.activity()
            return out

        return self._on_loop(read)

    def subscribe(self, every_n: int) -> _Subscriber:
        sub = _Subscriber(every_n)
        sub.event_cursor = len(self.engine.world.event_log)
        with self._sub_lock:
            self._subscribers.append(sub)
        return sub

    def snapshot_message(self) -> dict:
        """Consistent full-state message for a freshly connected subscriber."""

        def read():
            return {
                "type": "state",
                "state": self.engine.state_dict(),
                "events": [],
                "events_dropped": 0,
                "activity": self.activity(),
            }

        return self._on_loop(read)

    def unsubscribe(self, sub: _Subscriber):
        sub.alive = False

    def scene_config(self) -> dict:
        """Static per-robot configuration, so clients can mirror capability
        and limit checks instead of discovering them through rejections."""

        def read():
            scene = self.engine.scene
            return {
                "scene": scene.name,
                "tick_seconds": scene.tick_seconds,
                "jog_duration_max_s": MAX_JOG_DURATION_S,
                "robots": [
                    {
                        "id": cfg.id,
                        "kind": cfg.kind.value,
                        "has_arm": cfg.kind.has_arm,
                        "has_camera": cfg.kind.has_camera,
                        "joint_limits": [list(pair) for pair in cfg.joint_limits],
                        "presets": sorted(cfg.presets),
                        "speed": {
                            "linear_mps": cfg.speed.linear_mps,
                            "angular_dps": cfg.speed.angular_dps,
                            "joint_dps": cfg.speed.joint_dps,
                        },
                    }
                    for cfg in (scene.robot(rid) for rid in scene.robot_ids())
                ],
            }

        return self._on_loop(read)

    def load_scene(self, scene: Scene) -> dict:
        def swap():
            if self.engine.busy_robots():
                raise BindError("robots are executing; stop them before loading a scene")
            self.engine = Engine(scene)
            self._robot_command.clear()
            self._prev_busy = set()
            with self._sub_lock:
                for sub in self._subscribers:
                    sub.event_cursor = 0
            return {"scene": scene.name, "robots": scene.robot_ids()}

        return self._on_loop(swap)

    def timings_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["mode", "command_id", "operation_seconds"])
        for t in self._timings:
            op = t.operation_seconds
            writer.writerow([t.mode, t.command_id, "" if op is None else f"{op:.3f}"])
        return buf.getvalue()

    def timings(self) -> list:
        return [
            {
                "session": t.session,
                "command_id": t.command_id,
                "mode": t.mode,
                "task": t.task,
                "operation_seconds": t.operation_seconds,
            }
            for t in self._timings
        ]

    def task_summary(self) -> list:
        """Operation time summed per (session, task) group; rows without a
        task id stay ungrouped as single-command tasks."""
        groups: dict = {}
        for t in self._timings:
            key = (t.session, t.task if t.task is not None else t.command_id)
            row = groups.setdefault(
                key,
                {"session": key[0], "task": key[1], "mode": t.mode,
                 "actions": 0, "operation_seconds": 0.0, "complete": True},
            )
            row["actions"] += 1
            op = t.operation_seconds
            if op is None:
                row["complete"] = False
            else:
                row["operation_seconds"] += op
        return list(groups.values())


# --- HTTP/WS application ------------------------------------------------------------


def create_app(service: SimService):
    """Wire a SimService into a FastAPI app (imported lazily so headless
    installs don't need the web stack)."""
    import asyncio
    from contextlib import asynccontextmanager

    from fastapi import FastAPI
    from fastapi.responses import PlainTextResponse
    from starlette.routing import WebSocketRoute
    from starlette.websockets import WebSocketDisconnect

    from .world import SceneError, load_scene as parse_scene_doc

    @asynccontextmanager
    async def lifespan(_app):
        service.start()
        yield
        service.stop()

    app = FastAPI(title="linguasim gateway", lifespan=lifespan)
    app.state.service = service

    @app.post("/api/command")
    def command(payload: dict):
        return service.submit_command(payload)

    @app.post("/api/manual/{robot_id}")
    def manual(robot_id: str, payload: dict):
        return service.manual_control(robot_id, payload)

    @app.get("/api/state")
    def state():
        return service.state()

    @app.get("/api/scene")
    def scene_config():
        return service.scene_config()

    @app.get("/api/backends")
    def backends():
        return {
            "backends": sorted(service.backends),
            "default": service.default_backend,
        }

    @app.get("/api/timings")
    def timings():
        return {"timings": service.timings(), "tasks": service.task_summary()}

    @app.get("/api/timings.csv")
    def timings_csv():
        return PlainTextResponse(service.timings_csv(), media_type="text/csv")

    @app.post("/api/scene/load")
    def scene_load(payload: dict):
        try:
            if "scene" in payload:
                import json as _json

                scene = parse_scene_doc(_json.dumps(payload["scene"]))
            elif "path" in payload:
                from .world import load_scene_file

                scene = load_scene_file(payload["path"])
            else:
                return {"status": "rejected", "error": "provide 'scene' or 'path'"}
            return {"status": "loaded", **service.load_scene(scene)}
        except (SceneError, OSError, BindError) as exc:
            return {"status": "rejected", "error": str(exc)}

    # plain starlette route: the deferred `WebSocket` name is invisible to
    # signature inspection, so parameter injection can't be used here
    async def ws_state(ws):
        await ws.accept()
        try:
            every_n = max(1, int(ws.query_params.get("every_n", "4")))
        except ValueError:
            every_n = 4
        sub = service.subscribe(every_n)
        loop = asyncio.get_event_loop()

        def next_message():
            return sub.queue.get(timeout=5.0)

        try:
            await ws.send_json(service.snapshot_message())
            while True:
                try:
                    message = await loop.run_in_executor(None, next_message)
                except queue.Empty:
                    continue  # idle interval; also bounds executor occupancy
                await ws.send_json(message)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            service.unsubscribe(sub)

    app.router.routes.append(WebSocketRoute("/ws/state", ws_state))

    return app


def mount_frontend(app, dist_dir) -> bool:
    """Serve the built console UI at / when a dist directory exists."""
    import os

    if not dist_dir or not os.path.isdir(dist_dir):
        return False
    from fastapi.staticfiles import StaticFiles

    app.mount("/", StaticFiles(directory=dist_dir, html=True), name="console")
    return True
