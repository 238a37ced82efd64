"""Deterministic fixed-timestep world execution.

One Engine owns one WorldState. Robots advance concurrently each tick in
ascending id order; every mutation flows through step(), so two runs from the
same scene and plan are tick-for-tick identical.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

from .actions import ActionCall, ActionScript, MultiRobotPlan, lookup
from .motion import (
    Axis,
    AxisMotion,
    AxisMove,
    DecelProfile,
    decompose,
    end_effector_point,
)
from .world import (
    DEFAULT_BASE_HEIGHT,
    DEFAULT_LINK_LENGTHS,
    ZERO_JOINTS,
    GripperState,
    JointVector,
    Pose2D,
    RobotState,
    Scene,
    normalize_heading,
)

GRASP_RADIUS = 0.05       # meters around the end-effector ground point
CAMERA_RANGE = 3.0        # meters
CAMERA_HALF_FOV = 60.0    # degrees either side of heading
FRAME_AHEAD = 0.30        # transport frame center, meters ahead of base center
FRAME_WIDTH = 0.35        # lateral extent, meters
FRAME_DEPTH = 0.30        # extent along the forward axis, meters

ARM_PRIMITIVES = frozenset(
    {"moveArmSequential", "presetFold", "presetExtend", "openGripper", "closeGripper"}
)
CAMERA_PRIMITIVES = frozenset({"capturePhoto"})


class EventKind(str, Enum):
    CALL_STARTED = "call_started"
    CALL_FINISHED = "call_finished"
    SNAPSHOT_TAKEN = "snapshot_taken"
    GRIPPER_CLOSED = "gripper_closed"
    GRIPPER_OPENED = "gripper_opened"
    OBJECT_ATTACHED = "object_attached"
    OBJECT_RELEASED = "object_released"
    OVERSHOOT_CORRECTED = "overshoot_corrected"
    RUNTIME_FAULT = "runtime_fault"


@dataclass(frozen=True)
class Event:
    tick: int
    robot: str
    kind: EventKind
    payload: str = ""


@dataclass(frozen=True)
class SnapshotRecord:
    """Schematic camera capture: visible objects as (id, range_m, bearing_deg)."""

    tick: int
    robot: str
    pose: Pose2D
    entries: tuple


@dataclass(frozen=True)
class RuntimeLimits:
    max_ticks_per_call: int = 4000
    max_ticks_per_script: int = 40000

    def __post_init__(self):
        if self.max_ticks_per_call <= 0 or self.max_ticks_per_script <= 0:
            raise ValueError("tick limits must be positive")


class ExecStatus(str, Enum):
    RUNNING = "running"
    COMPLETED = "completed"
    FAULT = "fault"
    TIMEOUT = "timeout"


@dataclass
class ExecutionOutcome:
    robot: str
    status: ExecStatus
    calls_completed: int
    ticks_used: int
    fault: Optional[tuple[int, str]] = None  # (call index, reason)


@dataclass
class WorldState:
    tick: int
    robots: dict          # id -> RobotState
    objects: dict         # id -> SceneObject
    event_log: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)


class BindError(Exception):
    pass


class UnknownRobot(BindError):
    def __init__(self, robot: str):
        self.robot = robot
        super().__init__(f"unknown robot {robot!r}")


class RobotBusy(BindError):
    def __init__(self, robot: str):
        self.robot = robot
        super().__init__(f"robot {robot!r} already has a script in flight")


class CapabilityMismatch(BindError):
    def __init__(self, robot: str, call: str, reason: str):
        self.robot = robot
        self.call = call
        super().__init__(f"robot {robot!r} cannot execute {call}: {reason}")


class JointLimit(BindError):
    def __init__(self, robot: str, joint_index: int, value: float):
        self.robot = robot
        self.joint_index = joint_index
        self.value = value
        super().__init__(f"robot {robot!r} joint {joint_index + 1} target {value} outside limits")


@dataclass
class _CallRuntime:
    call: ActionCall
    index: int
    moves: list
    move_idx: int = 0
    motion: Optional[AxisMotion] = None
    scalar: float = 0.0            # progress along a body_forward move
    arm_target: Optional[JointVector] = None
    ticks: int = 0


@dataclass
class _JogRuntime:
    vx: float
    vy: float
    omega: float
    ticks_left: int


class _RobotExec:
    def __init__(self, robot_id: str, calls: tuple, limits: RuntimeLimits):
        self.robot_id = robot_id
        self.calls = calls
        self.limits = limits
        self.next_call = 0
        self.current: Optional[_CallRuntime] = None
        self.jog: Optional[_JogRuntime] = None
        self.status = ExecStatus.RUNNING
        self.calls_completed = 0
        self.ticks_used = 0
        self.fault: Optional[tuple[int, str]] = None

    def outcome(self) -> ExecutionOutcome:
        return ExecutionOutcome(
            robot=self.robot_id,
            status=self.status,
            calls_completed=self.calls_completed,
            ticks_used=self.ticks_used,
            fault=self.fault,
        )


class Engine:
    """Single-writer simulation core; snapshots and events are safe to share."""

    def __init__(self, scene: Scene, dt: Optional[float] = None, limits: Optional[RuntimeLimits] = None):
        self.scene = scene
        self.dt = dt if dt is not None else scene.tick_seconds
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        self.limits = limits or RuntimeLimits()
        self.world = WorldState(
            tick=0,
            robots={
                cfg.id: RobotState(
                    id=cfg.id,
                    kind=cfg.kind,
                    pose=cfg.pose,
                    joints=ZERO_JOINTS,
                    trajectory=[(0, cfg.pose)],
                )
                for cfg in scene.robots
            },
            objects={obj.id: obj for obj in scene.objects},
        )
        self._order = sorted(self.world.robots)
        self._execs: dict[str, _RobotExec] = {}
        self._profiles = {cfg.id: self._profile_for(cfg) for cfg in scene.robots}
        self._subscribers: list[tuple[Callable[[dict], None], int]] = []

    @staticmethod
    def _profile_for(cfg) -> DecelProfile:
        d = cfg.decel
        return DecelProfile(
            slow_window=d.window_m,
            stop_tolerance=d.stop_tol_m,
            angular_slow_window=d.angular_window_deg,
            angular_stop_tolerance=d.angular_stop_tol_deg,
        )

    # -- plan intake -----------------------------------------------------------

    def busy_robots(self) -> set:
        return {rid for rid, ex in self._execs.items() if ex.status is ExecStatus.RUNNING}

    def bind_plan(self, plan: MultiRobotPlan, limits: Optional[RuntimeLimits] = None) -> list[str]:
        """Validate a plan against the scene and queue it. Returns the robot ids bound.

        All-or-nothing: any validation error leaves the engine untouched.
        """
        limits = limits or self.limits
        prepared: list[tuple[str, tuple]] = []
        for robot_id, script in plan.scripts.items():
            if robot_id is None:
                raise UnknownRobot("<unaddressed>")
            cfg = None
            for candidate in self.scene.robots:
                if candidate.id == robot_id:
                    cfg = candidate
                    break
            if cfg is None:
                raise UnknownRobot(robot_id)
            if robot_id in self.busy_robots():
                raise RobotBusy(robot_id)
            for call in script.calls:
                self._check_capability(cfg, call)
            prepared.append((robot_id, script.calls))
        for robot_id, calls in prepared:
            self._execs[robot_id] = _RobotExec(robot_id, calls, limits)
        return [rid for rid, _ in prepared]

    @staticmethod
    def _check_capability(cfg, call: ActionCall):
        if call.name in CAMERA_PRIMITIVES and not cfg.kind.has_camera:
            raise CapabilityMismatch(cfg.id, str(call), f"{cfg.kind.value} has no camera")
        if call.name in ARM_PRIMITIVES and not cfg.kind.has_arm:
            raise CapabilityMismatch(cfg.id, str(call), f"{cfg.kind.value} has no arm")
        if call.name == "moveArmSequential":
            bad = JointVector(tuple(call.args)).check_limits(cfg.joint_limits)
            if bad is not None:
                raise JointLimit(cfg.id, bad[0], bad[1])
        if call.name == "presetFold" and "fold" not in cfg.presets:
            raise CapabilityMismatch(cfg.id, str(call), "no fold preset configured")
        if call.name == "presetExtend" and "extend" not in cfg.presets:
            raise CapabilityMismatch(cfg.id, str(call), "no extend preset configured")

    def start_jog(self, robot_id: str, vx: float, vy: float, omega: float, duration: float):
        """Direct bounded-velocity teleop; bypasses deceleration staging."""
        if robot_id not in self.world.robots:
            raise UnknownRobot(robot_id)
        if robot_id in self.busy_robots():
            raise RobotBusy(robot_id)
        cfg = self.scene.robot(robot_id)
        vx = max(-cfg.speed.linear_mps, min(cfg.speed.linear_mps, vx))
        vy = max(-cfg.speed.linear_mps, min(cfg.speed.linear_mps, vy))
        omega = max(-cfg.speed.angular_dps, min(cfg.speed.angular_dps, omega))
        ticks = max(1, round(duration / self.dt))
        ex = _RobotExec(robot_id, (), self.limits)
        ex.jog = _JogRuntime(vx=vx, vy=vy, omega=omega, ticks_left=ticks)
        self._execs[robot_id] = ex
        self._emit(
            self.world.tick + 1,
            robot_id,
            EventKind.CALL_STARTED,
            f"jog({vx}, {vy}, {omega}, {duration})",
        )

    # -- events and observation -------------------------------------------------

    def _emit(self, tick: int, robot: str, kind: EventKind, payload: str = ""):
        self.world.event_log.append(Event(tick=tick, robot=robot, kind=kind, payload=payload))

    def subscribe(self, callback: Callable[[dict], None], every_n_ticks: int = 1):
        """Publish a serialized snapshot to callback every n ticks."""
        if every_n_ticks < 1:
            raise ValueError("every_n_ticks must be >= 1")
        self._subscribers.append((callback, every_n_ticks))

    def capture_snapshot(self, robot_id: str, tick: Optional[int] = None) -> SnapshotRecord:
        """Record what the robot's camera sees; raises for camera-less robots."""
        state = self.world.robots.get(robot_id)
        if state is None:
            raise UnknownRobot(robot_id)
        if not state.kind.has_camera:
            raise CapabilityMismatch(robot_id, "capturePhoto()", f"{state.kind.value} has no camera")
        tick = self.world.tick if tick is None else tick
        entries = []
        for oid in sorted(self.world.objects):
            obj = self.world.objects[oid]
            dx = obj.position[0] - state.pose.x
            dy = obj.position[1] - state.pose.y
            rng = math.hypot(dx, dy)
            if rng > CAMERA_RANGE:
                continue
            bearing = normalize_heading(math.degrees(math.atan2(dy, dx)) - state.pose.heading)
            if abs(bearing) > CAMERA_HALF_FOV:
                continue
            entries.append((oid, rng, bearing))
        state.photo_count += 1
        record = SnapshotRecord(tick=tick, robot=robot_id, pose=state.pose, entries=tuple(entries))
        self.world.snapshots.append(record)
        self._emit(
            tick,
            robot_id,
            EventKind.SNAPSHOT_TAKEN,
            f"photo {state.photo_count}: {len(entries)} object(s)",
        )
        return record

    # -- stepping ----------------------------------------------------------------

    def step(self):
        """Advance the world by one tick."""
        tick = self.world.tick + 1
        for rid in self._order:
            ex = self._execs.get(rid)
            if ex is not None and ex.status is ExecStatus.RUNNING:
                self._advance(ex, tick)
        for rid in self._order:
            state = self.world.robots[rid]
            state.trajectory.append((tick, state.pose))
        self.world.tick = tick
        for callback, every_n in self._subscribers:
            if tick % every_n == 0:
                callback(self.state_dict())

    def _advance(self, ex: _RobotExec, tick: int):
        ex.ticks_used += 1
        state = self.world.robots[ex.robot_id]

        if ex.jog is not None:
            self._advance_jog(ex, state, tick)
            return

        if ex.current is None:
            if ex.next_call >= len(ex.calls):
                ex.status = ExecStatus.COMPLETED
                return
            call = ex.calls[ex.next_call]
            ex.current = _CallRuntime(call=call, index=ex.next_call, moves=decompose(call, state))
            ex.next_call += 1
            self._emit(tick, ex.robot_id, EventKind.CALL_STARTED, str(call))

        rt = ex.current
        rt.ticks += 1
        if rt.ticks > ex.limits.max_ticks_per_call:
            ex.status = ExecStatus.FAULT
            ex.fault = (rt.index, "call timeout")
            ex.current = None
            self._emit(tick, ex.robot_id, EventKind.RUNTIME_FAULT, "call timeout")
            return

        name = rt.call.name
        if name in ("presetFold", "presetExtend", "openGripper", "closeGripper", "capturePhoto"):
            self._run_instant(ex, rt, state, tick)
        elif name == "moveArmSequential":
            self._advance_arm(ex, rt, state, tick)
        else:
            self._advance_base(ex, rt, state, tick)

    def _finish_call(self, ex: _RobotExec, tick: int):
        self._emit(tick, ex.robot_id, EventKind.CALL_FINISHED, str(ex.current.call))
        ex.calls_completed += 1
        ex.current = None
        if ex.next_call >= len(ex.calls):
            ex.status = ExecStatus.COMPLETED

    def _run_instant(self, ex: _RobotExec, rt: _CallRuntime, state: RobotState, tick: int):
        cfg = self.scene.robot(state.id)
        name = rt.call.name
        if name == "presetFold":
            state.joints = cfg.preset("fold")
        elif name == "presetExtend":
            state.joints = cfg.preset("extend")
        elif name == "closeGripper":
            self._close_gripper(state, tick)
        elif name == "openGripper":
            self._open_gripper(state, tick)
        elif name == "capturePhoto":
            self.capture_snapshot(state.id, tick)
        self._sync_attached(state)
        self._finish_call(ex, tick)

    def _close_gripper(self, state: RobotState, tick: int):
        state.gripper = GripperState.CLOSED
        self._emit(tick, state.id, EventKind.GRIPPER_CLOSED)
        if state.attached_object is not None:
            return
        ee = end_effector_point(state.pose, state.joints, DEFAULT_LINK_LENGTHS, DEFAULT_BASE_HEIGHT)
        best = None
        for oid in sorted(self.world.objects):
            obj = self.world.objects[oid]
            if not obj.movable:
                continue
            dist = math.hypot(obj.position[0] - ee[0], obj.position[1] - ee[1])
            if dist <= GRASP_RADIUS and (best is None or dist < best[1]):
                best = (oid, dist)
        if best is not None:
            oid = best[0]
            state.attached_object = oid
            self.world.objects[oid] = replace(self.world.objects[oid], position=ee)
            self._emit(tick, state.id, EventKind.OBJECT_ATTACHED, oid)
        # closing on empty space is a no-op, not a fault

    def _open_gripper(self, state: RobotState, tick: int):
        state.gripper = GripperState.OPEN
        self._emit(tick, state.id, EventKind.GRIPPER_OPENED)
        if state.attached_object is not None:
            oid = state.attached_object
            ee = end_effector_point(state.pose, state.joints, DEFAULT_LINK_LENGTHS, DEFAULT_BASE_HEIGHT)
            self.world.objects[oid] = replace(self.world.objects[oid], position=ee)
            state.attached_object = None
            self._emit(tick, state.id, EventKind.OBJECT_RELEASED, oid)

    def _advance_arm(self, ex: _RobotExec, rt: _CallRuntime, state: RobotState, tick: int):
        if rt.arm_target is None:
            rt.arm_target = JointVector(tuple(rt.call.args))
        cfg = self.scene.robot(state.id)
        profile = self._profiles[state.id]
        max_step = cfg.speed.joint_dps * self.dt
        new_vals = []
        done = True
        for curr, target in zip(state.joints, rt.arm_target):
            rem = target - curr
            step = min(max_step, abs(rem))
            nxt = curr + math.copysign(step, rem) if rem else curr
            if abs(target - nxt) > profile.angular_stop_tolerance:
                done = False
            new_vals.append(nxt)
        state.joints = JointVector(tuple(new_vals))
        self._sync_attached(state)
        if done:
            self._finish_call(ex, tick)

    def _advance_base(self, ex: _RobotExec, rt: _CallRuntime, state: RobotState, tick: int):
        if rt.move_idx >= len(rt.moves):
            self._finish_call(ex, tick)
            return
        move: AxisMove = rt.moves[rt.move_idx]
        cfg = self.scene.robot(state.id)
        profile = self._profiles[state.id]

        if rt.motion is None:
            target = self._move_target(move, state)
            speed = cfg.speed.angular_dps if move.angular else cfg.speed.linear_mps
            rt.motion = AxisMotion(target, speed, profile, angular=move.angular)
            rt.scalar = 0.0

        curr = self._axis_value(move, state, rt)
        result = rt.motion.step(curr, self.dt)
        if result.overshoot:
            self._emit(tick, state.id, EventKind.OVERSHOOT_CORRECTED, move.axis.value)
        self._apply_axis(move, state, rt, curr, result.position)
        self._sync_attached(state)

        if result.done:
            rt.move_idx += 1
            rt.motion = None
            if rt.move_idx >= len(rt.moves):
                self._finish_call(ex, tick)

    @staticmethod
    def _move_target(move: AxisMove, state: RobotState) -> float:
        absolute = move.mode.value == "absolute"
        if move.axis is Axis.WORLD_X:
            return move.target_or_delta if absolute else state.pose.x + move.target_or_delta
        if move.axis is Axis.WORLD_Y:
            return move.target_or_delta if absolute else state.pose.y + move.target_or_delta
        if move.axis is Axis.HEADING:
            return normalize_heading(move.target_or_delta)
        # body axes are tracked as scalar progress from 0 to the delta
        return move.target_or_delta

    @staticmethod
    def _axis_value(move: AxisMove, state: RobotState, rt: _CallRuntime) -> float:
        if move.axis is Axis.WORLD_X:
            return state.pose.x
        if move.axis is Axis.WORLD_Y:
            return state.pose.y
        if move.axis is Axis.HEADING:
            return state.pose.heading
        return rt.scalar

    def _apply_axis(self, move: AxisMove, state: RobotState, rt: _CallRuntime, curr: float, nxt: float):
        if move.axis is Axis.HEADING:
            state.pose = Pose2D(state.pose.x, state.pose.y, nxt)
            return
        if move.axis is Axis.WORLD_X:
            self._translate(state, nxt - curr, 0.0)
        elif move.axis is Axis.WORLD_Y:
            self._translate(state, 0.0, nxt - curr)
        else:
            ds = nxt - curr
            rt.scalar = nxt
            heading = math.radians(state.pose.heading)
            if move.axis is Axis.BODY_FORWARD:
                self._translate(state, ds * math.cos(heading), ds * math.sin(heading))
            else:  # body lateral: +y in the body frame
                self._translate(state, -ds * math.sin(heading), ds * math.cos(heading))

    def _translate(self, state: RobotState, dx: float, dy: float):
        """Move a base, carrying transport-frame captives along."""
        if dx == 0.0 and dy == 0.0:
            return
        captured = self._frame_members(state) if state.kind.value == "box_bot" else ()
        state.pose = Pose2D(state.pose.x + dx, state.pose.y + dy, state.pose.heading)
        for oid in captured:
            obj = self.world.objects[oid]
            self.world.objects[oid] = replace(
                obj, position=(obj.position[0] + dx, obj.position[1] + dy)
            )

    def _frame_members(self, state: RobotState) -> list:
        """Movable objects whose centers sit inside the box robot's front frame."""
        heading = math.radians(state.pose.heading)
        cos_h, sin_h = math.cos(heading), math.sin(heading)
        members = []
        for oid in sorted(self.world.objects):
            obj = self.world.objects[oid]
            if not obj.movable:
                continue
            rel_x = obj.position[0] - state.pose.x
            rel_y = obj.position[1] - state.pose.y
            forward = rel_x * cos_h + rel_y * sin_h
            lateral = -rel_x * sin_h + rel_y * cos_h
            if (
                abs(forward - FRAME_AHEAD) <= FRAME_DEPTH / 2
                and abs(lateral) <= FRAME_WIDTH / 2
            ):
                members.append(oid)
        return members

    def _sync_attached(self, state: RobotState):
        if state.attached_object is None:
            return
        ee = end_effector_point(state.pose, state.joints, DEFAULT_LINK_LENGTHS, DEFAULT_BASE_HEIGHT)
        self.world.objects[state.attached_object] = replace(
            self.world.objects[state.attached_object], position=ee
        )

    def _advance_jog(self, ex: _RobotExec, state: RobotState, tick: int):
        jog = ex.jog
        heading = math.radians(state.pose.heading)
        dx = (jog.vx * math.cos(heading) - jog.vy * math.sin(heading)) * self.dt
        dy = (jog.vx * math.sin(heading) + jog.vy * math.cos(heading)) * self.dt
        self._translate(state, dx, dy)
        if jog.omega:
            state.pose = Pose2D(
                state.pose.x, state.pose.y, state.pose.heading + jog.omega * self.dt
            )
        self._sync_attached(state)
        jog.ticks_left -= 1
        if jog.ticks_left <= 0:
            ex.status = ExecStatus.COMPLETED
            self._emit(tick, ex.robot_id, EventKind.CALL_FINISHED, "jog")

    # -- whole-plan execution ------------------------------------------------------

    def run_to_completion(
        self, plan: MultiRobotPlan, limits: Optional[RuntimeLimits] = None
    ) -> tuple[WorldState, dict]:
        """Bind and execute a plan to quiescence; returns (world, outcomes by robot)."""
        limits = limits or self.limits
        bound = self.bind_plan(plan, limits)
        elapsed = 0
        while any(self._execs[rid].status is ExecStatus.RUNNING for rid in bound):
            if elapsed >= limits.max_ticks_per_script:
                for rid in bound:
                    ex = self._execs[rid]
                    if ex.status is ExecStatus.RUNNING:
                        ex.status = ExecStatus.TIMEOUT
                        self._emit(self.world.tick, rid, EventKind.RUNTIME_FAULT, "script timeout")
                break
            self.step()
            elapsed += 1
        return self.world, {rid: self._execs[rid].outcome() for rid in bound}

    # -- serialization ---------------------------------------------------------------

    def state_dict(self, events_from: Optional[int] = None) -> dict:
        """JSON-ready snapshot; optionally embeds event_log[events_from:]."""
        world = self.world
        out = {
            "tick": world.tick,
            "robots": [
                {
                    "id": rid,
                    "kind": world.robots[rid].kind.value,
                    "x": world.robots[rid].pose.x,
                    "y": world.robots[rid].pose.y,
                    "heading": world.robots[rid].pose.heading,
                    "joints": list(world.robots[rid].joints),
                    "gripper": world.robots[rid].gripper.value,
                    "attached": world.robots[rid].attached_object,
                    "photo_count": world.robots[rid].photo_count,
                }
                for rid in self._order
            ],
            "objects": [
                {
                    "id": oid,
                    "shape": world.objects[oid].shape.value,
                    "x": world.objects[oid].position[0],
                    "y": world.objects[oid].position[1],
                    "radius_or_halfextent": world.objects[oid].radius_or_halfextent,
                    "movable": world.objects[oid].movable,
                }
                for oid in sorted(world.objects)
            ],
            "regions": [
                {
                    "id": g.id,
                    "center": list(g.center),
                    "half_size": list(g.half_size),
                }
                for g in self.scene.regions
            ],
            "snapshots": [snapshot_to_dict(s) for s in world.snapshots[-20:]],
        }
        if events_from is not None:
            out["events"] = [event_to_dict(e) for e in world.event_log[events_from:]]
        return out


def event_to_dict(event: Event) -> dict:
    return {
        "tick": event.tick,
        "robot": event.robot,
        "kind": event.kind.value,
        "payload": event.payload,
    }


def snapshot_to_dict(record: SnapshotRecord) -> dict:
    return {
        "tick": record.tick,
        "robot": record.robot,
        "pose": {"x": record.pose.x, "y": record.pose.y, "heading": record.pose.heading},
        "entries": [
            {"object": oid, "range": rng, "bearing": bearing}
            for oid, rng, bearing in record.entries
        ],
    }


def trajectory_hash(world: WorldState) -> str:
    """Stable digest of every robot's trajectory, poses rounded to 1e-9."""
    digest = hashlib.sha256()
    for rid in sorted(world.robots):
        for tick, pose in world.robots[rid].trajectory:
            digest.update(
                f"{rid}|{tick}|{pose.x:.9f}|{pose.y:.9f}|{pose.heading:.9f}\n".encode()
            )
    return digest.hexdigest()


def run_to_completion(
    scene: Scene,
    plan: MultiRobotPlan,
    limits: Optional[RuntimeLimits] = None,
    dt: Optional[float] = None,
) -> tuple[WorldState, dict]:
    """Headless convenience: fresh engine, full run."""
    return Engine(scene, dt=dt, limits=limits).run_to_completion(plan, limits)
