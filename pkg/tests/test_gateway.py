"""Service layer and HTTP/WS endpoints: commands, teleop, timings, streaming."""

import threading
import time

import pytest

from linguasim.engine import BindError
from linguasim.gateway import (
    MAX_EVENTS_PER_PUSH,
    MAX_JOG_DURATION_S,
    SessionTiming,
    SimService,
    _Subscriber,
    create_app,
    mount_frontend,
)
from linguasim.planner import FaultInjectionBackend, OracleBackend
from linguasim.world import load_scene_file

from conftest import DATASET_PATH, SCENE_PATH

SIMPLE_TEXT = "Send bot1 to x = -2."
COMPOSITE_TEXT = "Photograph the area, move bot1 to y = 1, and photograph again."


class _EchoBackend:
    def __init__(self, script):
        self.script = script
        self.id = "echo"

    def complete(self, prompt):
        return f"```\n{self.script}\n```"


def make_service(extra_backends=None, **kwargs):
    oracle = OracleBackend.from_jsonl(DATASET_PATH)
    backends = {
        "oracle": oracle,
        "fault": FaultInjectionBackend(oracle, corrupt_instructions=frozenset({SIMPLE_TEXT})),
    }
    backends.update(extra_backends or {})
    return SimService(
        load_scene_file(SCENE_PATH),
        backends,
        default_backend="oracle",
        realtime=kwargs.pop("realtime", False),
        **kwargs,
    )


def step(service, n):
    for _ in range(n):
        service.engine.step()


def run_until_idle(service, max_ticks=20000):
    for _ in range(max_ticks):
        if not service.engine.busy_robots():
            return
        service.engine.step()
    raise AssertionError("robots never went idle")


# -- natural-language commands (headless) ---------------------------------------------


class TestSubmitCommand:
    def test_executing_round_trip(self):
        service = make_service()
        reply = service.submit_command({"text": SIMPLE_TEXT, "robots": ["bot1"]})
        assert reply["status"] == "executing"
        assert reply["command_id"] == "cmd-1"
        assert reply["robots"] == ["bot1"]
        assert reply["backend"] == "oracle"
        assert "moveToX(-2" in reply["plan"]
        assert reply["script"] == "moveToX(-2)"
        assert reply["latency_s"] >= 0.0
        # the full exchange comes back: prompt available for a debug disclosure
        assert SIMPLE_TEXT in reply["prompt"]
        assert "Available functions:" in reply["prompt"]
        run_until_idle(service)
        pose = service.engine.world.robots["bot1"].pose
        assert abs(pose.x - (-2.0)) <= 0.011

    def test_empty_text_rejected(self):
        service = make_service()
        reply = service.submit_command({"text": "   "})
        assert reply["status"] == "rejected"
        assert "empty" in reply["error"]

    def test_unknown_backend_rejected(self):
        service = make_service()
        reply = service.submit_command({"text": SIMPLE_TEXT, "backend": "tarot"})
        assert reply["status"] == "rejected"
        assert "tarot" in reply["error"]

    def test_unplannable_instruction_is_a_backend_error(self):
        service = make_service()
        reply = service.submit_command({"text": "Paint the fence.", "robots": ["bot1"]})
        assert reply["status"] == "backend_error"
        assert reply["command_id"] == "cmd-1"

    def test_parse_failure_reports_the_line(self):
        service = make_service()
        reply = service.submit_command(
            {"text": SIMPLE_TEXT, "robots": ["bot1"], "backend": "fault"}
        )
        assert reply["status"] == "parse_failed"
        assert reply["error_line"] == 1
        assert "doBarrelRoll" in reply["script"]
        assert service.engine.busy_robots() == set()

    def test_headerless_reply_for_whole_fleet_fails_to_parse(self):
        # robots omitted means all three, so the script must name its robot
        service = make_service(extra_backends={"echo": _EchoBackend("moveForward(1)")})
        reply = service.submit_command({"text": "anything", "backend": "echo"})
        assert reply["status"] == "parse_failed"
        assert "which robot" in reply["error"]

    def test_busy_robot_is_a_bind_failure(self):
        service = make_service()
        first = service.submit_command({"text": SIMPLE_TEXT, "robots": ["bot1"]})
        assert first["status"] == "executing"
        second = service.submit_command({"text": SIMPLE_TEXT, "robots": ["bot1"]})
        assert second["status"] == "bind_failed"
        assert "in flight" in second["error"]

    def test_command_ids_are_sequential(self):
        service = make_service()
        service.submit_command({"text": "   "})  # rejected before an id is minted
        a = service.submit_command({"text": SIMPLE_TEXT, "robots": ["bot1"]})
        b = service.submit_command({"text": COMPOSITE_TEXT, "robots": ["bot1"]})
        assert a["command_id"] == "cmd-1"
        assert b["command_id"] == "cmd-2"  # busy robot, still gets an id
        assert b["status"] == "bind_failed"


# -- manual teleop (headless) -------------------------------------------------------


class TestManualControl:
    def test_jog_moves_the_base(self):
        service = make_service()
        reply = service.manual_control(
            "bot1", {"action": "base_jog", "vx": 0.2, "duration": 1.0}
        )
        assert reply["status"] == "accepted"
        assert reply["mode"] == "jog"
        step(service, 20)
        pose = service.engine.world.robots["bot1"].pose
        # bot1 faces -y, so body-forward jog of 0.2 m/s for 1 s drops y by 0.2
        assert pose.y == pytest.approx(1.8, abs=1e-9)
        assert pose.x == pytest.approx(0.5, abs=1e-9)
        assert service.engine.busy_robots() == set()

    @pytest.mark.parametrize("duration", [0.0, -1.0, MAX_JOG_DURATION_S + 0.1])
    def test_jog_duration_bounds(self, duration):
        service = make_service()
        reply = service.manual_control(
            "bot1", {"action": "base_jog", "vx": 0.1, "duration": duration}
        )
        assert reply["status"] == "rejected"
        assert "duration" in reply["error"]

    def test_base_move_takes_one_call(self):
        service = make_service()
        reply = service.manual_control(
            "bot1", {"action": "base_move", "call": "moveForward(0.3)"}
        )
        assert reply == {
            "command_id": reply["command_id"],
            "status": "accepted",
            "call": "moveForward(0.3)",
        }
        multi = service.manual_control(
            "bot2", {"action": "base_move", "call": "moveForward(1)\nmoveToY(0)"}
        )
        assert multi["status"] == "rejected"
        assert "exactly one call" in multi["error"]
        bad = service.manual_control("bot2", {"action": "base_move", "call": "hop(1)"})
        assert bad["status"] == "rejected"

    def test_arm_set_round_trip(self):
        service = make_service()
        reply = service.manual_control(
            "bot3", {"action": "arm_set", "joints": [10, 20, -30, 40, 50]}
        )
        assert reply["status"] == "accepted"
        assert reply["call"] == "moveArmSequential(10.0, 20.0, -30.0, 40.0, 50.0)"
        run_until_idle(service)
        joints = service.engine.world.robots["bot3"].joints
        assert max(abs(g - w) for g, w in zip(joints, (10, 20, -30, 40, 50))) <= 0.5

    def test_arm_set_respects_capabilities_and_limits(self):
        service = make_service()
        armless = service.manual_control(
            "bot1", {"action": "arm_set", "joints": [0, 0, 0, 0, 0]}
        )
        assert armless["status"] == "rejected"
        assert "no arm" in armless["error"]
        beyond = service.manual_control(
            "bot3", {"action": "arm_set", "joints": [0, 95, 0, 0, 0]}
        )
        assert beyond["status"] == "rejected"
        assert "joint 2" in beyond["error"]

    def test_arm_preset_names(self):
        service = make_service()
        ok = service.manual_control("bot3", {"action": "arm_preset", "name": "extend"})
        assert ok["status"] == "accepted"
        assert ok["call"] == "presetExtend()"
        bad = service.manual_control("bot3", {"action": "arm_preset", "name": "wave"})
        assert bad["status"] == "rejected"

    def test_gripper_states(self):
        service = make_service()
        ok = service.manual_control("bot3", {"action": "gripper", "state": "close"})
        assert ok["status"] == "accepted"
        assert ok["call"] == "closeGripper()"
        bad = service.manual_control("bot3", {"action": "gripper", "state": "crush"})
        assert bad["status"] == "rejected"

    def test_capture_photo_returns_the_snapshot(self):
        service = make_service()
        reply = service.manual_control("bot1", {"action": "capture_photo"})
        assert reply["status"] == "accepted"
        assert "entries" in reply["snapshot"]
        assert service.engine.world.robots["bot1"].photo_count == 1
        refused = service.manual_control("bot2", {"action": "capture_photo"})
        assert refused["status"] == "rejected"
        assert "camera" in refused["error"]

    def test_unknown_action_and_robot(self):
        service = make_service()
        assert service.manual_control("bot1", {"action": "dance"})["status"] == "rejected"
        assert service.manual_control("ghost", {"action": "capture_photo"})["status"] == "rejected"

    def test_manual_keeps_scripted_robot_locked(self):
        service = make_service()
        service.manual_control("bot1", {"action": "base_jog", "vx": 0.1, "duration": 1.0})
        reply = service.submit_command({"text": SIMPLE_TEXT, "robots": ["bot1"]})
        assert reply["status"] == "bind_failed"


# -- state and activity ------------------------------------------------------------


class TestStateView:
    def test_state_keys_and_activity(self):
        service = make_service()
        service.submit_command({"text": COMPOSITE_TEXT, "robots": ["bot1"]})
        step(service, 3)
        state = service.state()
        assert set(state) == {
            "tick",
            "robots",
            "objects",
            "regions",
            "snapshots",
            "events",
            "activity",
        }
        activity = state["activity"]["bot1"]
        assert activity["status"] == "running"
        assert activity["command"] == "cmd-1"
        assert activity["calls_total"] == 3
        run_until_idle(service)
        done = service.state()["activity"]["bot1"]
        assert done["status"] == "completed"
        assert done["calls_completed"] == 3

    def test_event_tail_is_limited(self):
        service = make_service()
        service.submit_command({"text": COMPOSITE_TEXT, "robots": ["bot1"]})
        run_until_idle(service)
        assert len(service.state(events_tail=2)["events"]) == 2

    def test_scene_config_exposes_limits_and_capabilities(self):
        config = make_service().scene_config()
        assert config["scene"] == "threebot"
        assert config["tick_seconds"] == 0.05
        assert config["jog_duration_max_s"] == 2.0
        rows = {r["id"]: r for r in config["robots"]}
        assert set(rows) == {"bot1", "bot2", "bot3"}
        assert rows["bot1"]["has_camera"] and not rows["bot1"]["has_arm"]
        arm = rows["bot3"]
        assert arm["has_arm"]
        assert arm["presets"] == ["extend", "fold"]
        assert len(arm["joint_limits"]) == 5
        lo, hi = arm["joint_limits"][1]
        assert lo < 0 < hi  # real interval, usable for client-side clamping
        assert rows["bot2"]["speed"]["linear_mps"] == 0.5

    def test_scene_swap_requires_idle_robots(self):
        service = make_service()
        scene = load_scene_file(SCENE_PATH)
        service.submit_command({"text": SIMPLE_TEXT, "robots": ["bot1"]})
        with pytest.raises(BindError):
            service.load_scene(scene)
        run_until_idle(service)
        result = service.load_scene(scene)
        assert result == {"scene": "threebot", "robots": ["bot1", "bot2", "bot3"]}
        assert service.engine.world.tick == 0


# -- operation timing ---------------------------------------------------------------


class TestTimings:
    def test_operation_seconds_from_client_stamps(self):
        service = make_service()
        service.submit_command(
            {
                "text": SIMPLE_TEXT,
                "robots": ["bot1"],
                "client_input_started_at": 100.0,
                "client_submitted_at": 112.3,
            }
        )
        rows = service.timings()
        assert len(rows) == 1
        assert rows[0]["mode"] == "natural_language"
        assert rows[0]["command_id"] == "cmd-1"
        assert rows[0]["operation_seconds"] == pytest.approx(12.3)

    def test_missing_stamp_is_never_fabricated(self):
        service = make_service()
        service.manual_control(
            "bot1",
            {"action": "capture_photo", "client_submitted_at": 50.0},
        )
        assert service.timings()[0]["operation_seconds"] is None

    def test_reversed_stamps_clamp_to_zero(self):
        timing = SessionTiming(
            session="s",
            command_id="man-1",
            mode="manual",
            input_started_at=60.0,
            submitted_at=55.0,
            server_received_at=0.0,
        )
        assert timing.operation_seconds == 0.0

    def test_csv_export_millisecond_precision(self):
        service = make_service()
        service.submit_command(
            {
                "text": SIMPLE_TEXT,
                "robots": ["bot1"],
                "client_input_started_at": 10.0,
                "client_submitted_at": 22.3456,
            }
        )
        service.manual_control("bot1", {"action": "capture_photo"})
        lines = service.timings_csv().strip().splitlines()
        assert lines[0] == "mode,command_id,operation_seconds"
        assert lines[1] == "natural_language,cmd-1,12.346"
        assert lines[2] == "manual,man-2,"

    def test_task_summary_groups_and_sums(self):
        service = make_service()
        for i in range(8):
            service.manual_control(
                "bot3",
                {
                    "action": "gripper",
                    "state": "close" if i % 2 else "open",
                    "session": "s1",
                    "task": "stack-3",
                    "client_input_started_at": 10.0 * i,
                    "client_submitted_at": 10.0 * i + 0.5,
                },
            )
        service.submit_command(
            {
                "text": SIMPLE_TEXT,
                "robots": ["bot1"],
                "session": "s1",
                "client_input_started_at": 0.0,
                "client_submitted_at": 2.0,
            }
        )
        summary = {row["task"]: row for row in service.task_summary()}
        grouped = summary["stack-3"]
        assert grouped["actions"] == 8
        assert grouped["operation_seconds"] == pytest.approx(4.0)
        assert grouped["complete"] is True
        solo = summary["cmd-9"]  # untasked commands stand alone
        assert solo["actions"] == 1
        assert solo["operation_seconds"] == pytest.approx(2.0)

    def test_task_summary_marks_missing_stamps(self):
        service = make_service()
        service.manual_control(
            "bot3",
            {"action": "gripper", "state": "open", "task": "t", "session": "s"},
        )
        row = service.task_summary()[0]
        assert row["complete"] is False


# -- subscriber queue semantics -------------------------------------------------------


class TestSubscriberQueue:
    def test_latest_wins_preserves_state_and_merges_events(self):
        sub = _Subscriber(every_n=1)
        sub.push({"type": "state", "state": {"tick": 1}, "events": [{"e": 1}], "events_dropped": 0})
        sub.push({"type": "status", "tick": 2, "finished": [], "events": [{"e": 2}]})
        merged = sub.queue.get_nowait()
        assert merged["type"] == "state"  # the snapshot survived the merge
        assert merged["state"] == {"tick": 1}
        assert merged["events"] == [{"e": 1}, {"e": 2}]

    def test_event_overflow_is_counted(self):
        sub = _Subscriber(every_n=1)
        first = [{"i": i} for i in range(300)]
        second = [{"i": 300 + i} for i in range(300)]
        sub.push({"type": "state", "state": {}, "events": first, "events_dropped": 0})
        sub.push({"type": "state", "state": {}, "events": second, "events_dropped": 0})
        merged = sub.queue.get_nowait()
        assert len(merged["events"]) == MAX_EVENTS_PER_PUSH
        assert merged["events_dropped"] == 100
        assert merged["events"][-1] == {"i": 599}  # newest kept, oldest shed


# -- HTTP and WebSocket endpoints ------------------------------------------------------


@pytest.fixture
def client():
    from fastapi.testclient import TestClient

    service = make_service()
    app = create_app(service)
    with TestClient(app) as tc:
        yield tc, service


class TestHttpApi:
    def test_backends_listing(self, client):
        tc, _ = client
        body = tc.get("/api/backends").json()
        assert body["default"] == "oracle"
        assert "oracle" in body["backends"] and "fault" in body["backends"]

    def test_scene_config_endpoint(self, client):
        tc, _ = client
        body = tc.get("/api/scene").json()
        assert body["scene"] == "threebot"
        assert [r["id"] for r in body["robots"]] == ["bot1", "bot2", "bot3"]

    def test_command_and_state(self, client):
        tc, _ = client
        reply = tc.post(
            "/api/command", json={"text": SIMPLE_TEXT, "robots": ["bot1"]}
        ).json()
        assert reply["status"] == "executing"
        state = tc.get("/api/state").json()
        assert {r["id"] for r in state["robots"]} == {"bot1", "bot2", "bot3"}
        assert state["activity"]["bot1"]["command"] == reply["command_id"]

    def test_manual_endpoint(self, client):
        tc, _ = client
        reply = tc.post(
            "/api/manual/bot3", json={"action": "arm_preset", "name": "fold"}
        ).json()
        assert reply["status"] == "accepted"
        missing = tc.post("/api/manual/ghost", json={"action": "capture_photo"}).json()
        assert missing["status"] == "rejected"

    def test_timings_endpoints(self, client):
        tc, _ = client
        tc.post(
            "/api/command",
            json={
                "text": SIMPLE_TEXT,
                "robots": ["bot2"],
                "client_input_started_at": 5.0,
                "client_submitted_at": 7.0,
            },
        )
        body = tc.get("/api/timings").json()
        assert body["timings"][0]["operation_seconds"] == pytest.approx(2.0)
        assert body["tasks"][0]["actions"] == 1
        csv_reply = tc.get("/api/timings.csv")
        assert csv_reply.headers["content-type"].startswith("text/csv")
        assert csv_reply.text.splitlines()[0] == "mode,command_id,operation_seconds"

    def test_scene_load_inline_and_errors(self, client):
        tc, _ = client
        doc = {
            "name": "solo",
            "tick_seconds": 0.05,
            "robots": [
                {"id": "only", "kind": "camera_bot", "pose": {"x": 0, "y": 0, "heading": 0}}
            ],
            "objects": [],
            "regions": [],
        }
        reply = tc.post("/api/scene/load", json={"scene": doc}).json()
        assert reply == {"status": "loaded", "scene": "solo", "robots": ["only"]}
        assert tc.get("/api/state").json()["robots"][0]["id"] == "only"
        neither = tc.post("/api/scene/load", json={}).json()
        assert neither["status"] == "rejected"
        missing = tc.post("/api/scene/load", json={"path": "/nope.json"}).json()
        assert missing["status"] == "rejected"

    def test_scene_load_refused_while_busy(self):
        from fastapi.testclient import TestClient

        # realtime pacing keeps the jog in flight across both requests
        service = make_service(realtime=True)
        app = create_app(service)
        with TestClient(app) as tc:
            tc.post(
                "/api/manual/bot1",
                json={"action": "base_jog", "vx": 0.1, "duration": 2.0},
            )
            reply = tc.post(
                "/api/scene/load",
                json={"scene": {
                    "name": "x",
                    "tick_seconds": 0.05,
                    "robots": [
                        {"id": "r", "kind": "box_bot", "pose": {"x": 0, "y": 0, "heading": 0}}
                    ],
                    "objects": [],
                    "regions": [],
                }},
            ).json()
        assert reply["status"] == "rejected"
        assert "executing" in reply["error"]

    def test_websocket_streams_states(self, client):
        tc, _ = client
        with tc.websocket_connect("/ws/state?every_n=2") as ws:
            first = ws.receive_json()
            assert first["type"] == "state"
            assert first["events"] == []
            ticks = [first["state"]["tick"]]
            for _ in range(3):
                message = ws.receive_json()
                if message["type"] == "state":
                    ticks.append(message["state"]["tick"])
            assert ticks == sorted(ticks)
            assert ticks[-1] > ticks[0]  # the loop kept stepping underneath us

    def test_websocket_bad_cadence_falls_back(self, client):
        tc, _ = client
        with tc.websocket_connect("/ws/state?every_n=banana") as ws:
            assert ws.receive_json()["type"] == "state"


class TestMountFrontend:
    def test_serves_built_console(self, tmp_path):
        (tmp_path / "index.html").write_text("<html><body>console</body></html>")
        service = make_service()
        app = create_app(service)
        assert mount_frontend(app, tmp_path) is True
        from fastapi.testclient import TestClient

        with TestClient(app) as tc:
            page = tc.get("/")
            assert page.status_code == 200
            assert "console" in page.text
            # api routes keep precedence over the static mount
            assert tc.get("/api/backends").status_code == 200

    def test_missing_dist_dir(self):
        service = make_service()
        app = create_app(service)
        assert mount_frontend(app, "/definitely/not/here") is False
        assert mount_frontend(app, None) is False


# -- loop cadence under load -----------------------------------------------------------


class TestLoopSoak:
    def test_tick_cadence_with_ten_subscribers(self):
        service = make_service(realtime=True)
        dt = service.engine.dt
        subs = [service.subscribe(1) for _ in range(10)]
        stop = threading.Event()

        def drain(sub):
            while not stop.is_set():
                try:
                    sub.queue.get(timeout=0.1)
                except Exception:
                    pass
                time.sleep(0.001)  # slow consumer; forces merge pressure

        threads = [threading.Thread(target=drain, args=(s,), daemon=True) for s in subs]
        for t in threads:
            t.start()
        service.start()
        try:
            service.submit_command({"text": COMPOSITE_TEXT, "robots": ["bot1"]})
            samples = []
            started = time.monotonic()
            while time.monotonic() - started < 2.0:
                samples.append((time.monotonic(), service.engine.world.tick))
                time.sleep(0.2)
        finally:
            stop.set()
            service.stop()
            for sub in subs:
                service.unsubscribe(sub)

        (t0, tick0), (t1, tick1) = samples[0], samples[-1]
        assert tick1 > tick0, "the loop stalled"
        mean_period = (t1 - t0) / (tick1 - tick0)
        # cadence holds within a factor of two of the configured tick
        assert dt / 2 <= mean_period <= 2 * dt, mean_period
        for (ta, ka), (tb, kb) in zip(samples, samples[1:]):
            assert kb > ka, f"no progress between {ta:.2f}s and {tb:.2f}s"
