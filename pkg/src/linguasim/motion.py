"""Kinematic control laws: staged deceleration, overshoot handling, call
decomposition into axis moves, and planar arm forward kinematics.

Everything here is pure math over immutable inputs; the engine owns state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .actions import ActionCall
from .world import JointVector, Pose2D, RobotState, normalize_heading

STAGES = 7
# Guards exact stage boundaries k*window/7 against float rounding: the ratio
# at a boundary may land a few ulps above k, which ceil would bump a stage.
_BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class DecelProfile:
    """Staged slow-down settings for one robot (linear and angular axes)."""

    slow_window: float = 1.4          # meters
    stop_tolerance: float = 0.01      # meters
    angular_slow_window: float = 40.0     # degrees
    angular_stop_tolerance: float = 0.5   # degrees
    stages: int = STAGES

    def __post_init__(self):
        if self.stages != STAGES:
            raise ValueError(f"profile must have exactly {STAGES} stages")
        if not (self.slow_window > self.stop_tolerance > 0):
            raise ValueError("need slow_window > stop_tolerance > 0")
        if not (self.angular_slow_window > self.angular_stop_tolerance > 0):
            raise ValueError("need angular_slow_window > angular_stop_tolerance > 0")

    def window(self, angular: bool) -> float:
        return self.angular_slow_window if angular else self.slow_window

    def tolerance(self, angular: bool) -> float:
        return self.angular_stop_tolerance if angular else self.stop_tolerance


def decel_scale(remaining: float, window: float, stop_tolerance: float) -> float:
    """Speed scale in {0, 1/7, ..., 1} for the given remaining distance.

    Zero inside the stop tolerance; otherwise the stage index is
    ceil(7 * min(remaining/window, 1)), so stage k covers
    ((k-1)*window/7, k*window/7].
    """
    if remaining < 0:
        raise ValueError(f"remaining must be nonnegative, got {remaining}")
    if remaining <= stop_tolerance:
        return 0.0
    ratio = min(remaining / window, 1.0)
    stage = math.ceil(ratio * STAGES - _BOUNDARY_EPS)
    return max(stage, 1) / STAGES


def overshoot_detect(
    prev_signed_remaining: float, curr_signed_remaining: float, stop_tolerance: float
) -> bool:
    """True when the projected remaining flipped sign past the stop tolerance."""
    if prev_signed_remaining == 0.0 or curr_signed_remaining == 0.0:
        return False
    flipped = (prev_signed_remaining > 0) != (curr_signed_remaining > 0)
    return flipped and abs(curr_signed_remaining) > stop_tolerance


class Axis(str, Enum):
    WORLD_X = "world_x"
    WORLD_Y = "world_y"
    BODY_FORWARD = "body_forward"
    BODY_LATERAL = "body_lateral"
    HEADING = "heading"


class MoveMode(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class AxisMove:
    axis: Axis
    target_or_delta: float  # meters, or degrees for the heading axis
    mode: MoveMode

    @property
    def angular(self) -> bool:
        return self.axis is Axis.HEADING


@dataclass(frozen=True)
class ArmPlan:
    target: JointVector
    joint_speed_dps: float

    def __post_init__(self):
        if self.joint_speed_dps <= 0:
            raise ValueError("joint speed must be positive")


def decompose(call: ActionCall, state: RobotState) -> list[AxisMove]:
    """Expand a validated base-motion call into sequential axis moves.

    Arm, gripper, and photo calls return [] -- the engine handles those
    directly. State matters only for moveToXWithRotation's facing choice.
    """
    name, args = call.name, call.args
    if name == "moveForward":
        return [AxisMove(Axis.BODY_FORWARD, args[0], MoveMode.RELATIVE)]
    if name == "moveLateral":
        return [AxisMove(Axis.WORLD_X, args[0], MoveMode.RELATIVE)]
    if name == "moveToX":
        return [AxisMove(Axis.WORLD_X, args[0], MoveMode.ABSOLUTE)]
    if name == "moveToY":
        return [AxisMove(Axis.WORLD_Y, args[0], MoveMode.ABSOLUTE)]
    if name == "moveToXY":
        x, y = args[0], args[1]
        x_first = len(args) > 2 and args[2] == "xFirst"
        moves = [
            AxisMove(Axis.WORLD_Y, y, MoveMode.ABSOLUTE),
            AxisMove(Axis.WORLD_X, x, MoveMode.ABSOLUTE),
        ]
        return list(reversed(moves)) if x_first else moves
    if name == "rotateToBeta":
        return [AxisMove(Axis.HEADING, args[0], MoveMode.ABSOLUTE)]
    if name == "moveToXWithRotation":
        x = args[0]
        facing = 0.0 if x >= state.pose.x else -180.0
        return [
            AxisMove(Axis.HEADING, facing, MoveMode.ABSOLUTE),
            AxisMove(Axis.BODY_FORWARD, abs(x - state.pose.x), MoveMode.RELATIVE),
        ]
    if name in (
        "moveArmSequential",
        "presetFold",
        "presetExtend",
        "openGripper",
        "closeGripper",
        "capturePhoto",
    ):
        return []
    raise RuntimeError(f"unreachable: unvalidated call {name!r}")


def arm_forward_kinematics(
    joints: JointVector,
    link_lengths: tuple[float, float, float],
    base_height: float,
) -> tuple[float, float, float]:
    """Planar FK: (radial reach r, height z, yaw) for a pitch-chain arm.

    Pitch angles j2..j4 are measured from vertical; j1 is yaw, j5 (wrist
    roll) has no effect on the returned triple.
    """
    l2, l3, l4 = link_lengths
    j2 = math.radians(joints[1])
    j23 = j2 + math.radians(joints[2])
    j234 = j23 + math.radians(joints[3])
    r = l2 * math.sin(j2) + l3 * math.sin(j23) + l4 * math.sin(j234)
    z = base_height + l2 * math.cos(j2) + l3 * math.cos(j23) + l4 * math.cos(j234)
    return r, z, joints[0]


def end_effector_point(pose: Pose2D, joints: JointVector, link_lengths, base_height) -> tuple[float, float]:
    """Ground projection of the end effector in world coordinates."""
    r, _, yaw = arm_forward_kinematics(joints, link_lengths, base_height)
    direction = math.radians(pose.heading + yaw)
    return pose.x + r * math.cos(direction), pose.y + r * math.sin(direction)


@dataclass
class AxisStepResult:
    position: float
    done: bool
    overshoot: bool


class AxisMotion:
    """Tracks one axis move to completion across ticks.

    Keeps the previous signed remaining so an externally injected disturbance
    (or angular wraparound) is recognized as an overshoot; correction then
    runs at stage-1 speed until back inside the stop tolerance.
    """

    def __init__(
        self,
        target: float,
        max_speed: float,
        profile: DecelProfile,
        angular: bool = False,
    ):
        self.target = target
        self.max_speed = max_speed
        self.profile = profile
        self.angular = angular
        self.prev_remaining: Optional[float] = None
        self.correcting = False

    def _remaining(self, curr: float) -> float:
        if self.angular:
            return normalize_heading(self.target - curr)
        return self.target - curr

    def step(self, curr: float, dt: float) -> AxisStepResult:
        if dt <= 0:
            raise ValueError("dt must be positive")
        tol = self.profile.tolerance(self.angular)
        remaining = self._remaining(curr)

        overshoot = False
        if self.prev_remaining is not None and overshoot_detect(
            self.prev_remaining, remaining, tol
        ):
            overshoot = True
            self.correcting = True

        if abs(remaining) <= tol:
            self.correcting = False
            self.prev_remaining = remaining
            return AxisStepResult(position=curr, done=True, overshoot=overshoot)

        if self.correcting:
            scale = 1.0 / STAGES
        else:
            scale = decel_scale(abs(remaining), self.profile.window(self.angular), tol)
        step = min(self.max_speed * scale * dt, abs(remaining))
        nxt = curr + math.copysign(step, remaining)
        if self.angular:
            nxt = normalize_heading(nxt)

        after = self._remaining(nxt)
        done = abs(after) <= tol
        if done:
            self.correcting = False
        self.prev_remaining = after
        return AxisStepResult(position=nxt, done=done, overshoot=overshoot)


def step_axis(
    curr: float,
    target: float,
    max_speed: float,
    profile: DecelProfile,
    dt: float,
    angular: bool = False,
) -> tuple[float, bool, bool]:
    """Single stateless controller tick: (next, done, overshoot_event).

    Equivalent to one step of a fresh AxisMotion; sustained moves should hold
    an AxisMotion so overshoot memory survives between ticks.
    """
    result = AxisMotion(target, max_speed, profile, angular).step(curr, dt)
    return result.position, result.done, result.overshoot
