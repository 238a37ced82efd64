"""World description: robots, objects, regions, and the scene file format.

Everything here is a plain value type. Mutation of live robot state happens
only inside the simulation engine's step loop; consumers get snapshots.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional


class SceneError(ValueError):
    """A scene document failed validation. Carries the offending field path."""

    def __init__(self, field_path: str, reason: str):
        self.field_path = field_path
        self.reason = reason
        super().__init__(f"{field_path}: {reason}")


def normalize_heading(angle: float) -> float:
    """Wrap an angle in degrees into the half-open interval [-180, 180)."""
    if not math.isfinite(angle):
        raise ValueError(f"heading must be finite, got {angle!r}")
    wrapped = (angle + 180.0) % 360.0 - 180.0
    # Python's % keeps the result in [0, 360), so wrapped is already < 180;
    # guard the -0.0 corner for stable serialization.
    return wrapped + 0.0


@dataclass(frozen=True)
class Pose2D:
    """Planar pose: world-frame position in meters, heading in degrees [-180, 180)."""

    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"pose coordinates must be finite, got ({self.x}, {self.y})")
        object.__setattr__(self, "heading", normalize_heading(self.heading))

    def moved(self, dx: float = 0.0, dy: float = 0.0, dheading: float = 0.0) -> "Pose2D":
        return Pose2D(self.x + dx, self.y + dy, self.heading + dheading)


@dataclass(frozen=True)
class JointVector:
    """Five arm joint angles in degrees, j1 (base yaw) through j5 (wrist roll)."""

    values: tuple[float, float, float, float, float]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != 5:
            raise ValueError(f"joint vector needs exactly 5 entries, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def check_limits(self, limits: tuple) -> Optional[tuple[int, float]]:
        """Return (joint index, value) of the first out-of-limit joint, or None."""
        for i, (v, (lo, hi)) in enumerate(zip(self.values, limits)):
            if not (lo <= v <= hi):
                return i, v
        return None


ZERO_JOINTS = JointVector((0.0, 0.0, 0.0, 0.0, 0.0))


class RobotKind(str, Enum):
    CAMERA_BOT = "camera_bot"
    BOX_BOT = "box_bot"
    ARM_BOT = "arm_bot"

    @property
    def has_camera(self) -> bool:
        return self is RobotKind.CAMERA_BOT

    @property
    def has_arm(self) -> bool:
        return self is RobotKind.ARM_BOT


class GripperState(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class ObjectShape(str, Enum):
    BOX = "box"
    CYLINDER = "cylinder"


@dataclass(frozen=True)
class SpeedLimits:
    linear_mps: float = 0.5
    angular_dps: float = 45.0
    joint_dps: float = 90.0

    def __post_init__(self):
        for name in ("linear_mps", "angular_dps", "joint_dps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"speed.{name} must be positive")


@dataclass(frozen=True)
class DecelSettings:
    """Per-robot overrides for the deceleration profile (scene key `decel`)."""

    window_m: float = 1.4
    stop_tol_m: float = 0.01
    angular_window_deg: float = 40.0
    angular_stop_tol_deg: float = 0.5


# YouBot-scale arm geometry; configuration constants, not world facts.
DEFAULT_LINK_LENGTHS = (0.155, 0.135, 0.218)
DEFAULT_BASE_HEIGHT = 0.14

DEFAULT_JOINT_LIMITS = (
    (-169.0, 169.0),
    (-65.0, 90.0),
    (-151.0, 146.0),
    (-102.5, 102.5),
    (-165.0, 165.0),
)


@dataclass(frozen=True)
class RobotConfig:
    """Static per-robot configuration from the scene file."""

    id: str
    kind: RobotKind
    pose: Pose2D
    joint_limits: tuple = DEFAULT_JOINT_LIMITS
    presets: dict = field(default_factory=dict)
    speed: SpeedLimits = field(default_factory=SpeedLimits)
    decel: DecelSettings = field(default_factory=DecelSettings)

    def __post_init__(self):
        if len(self.joint_limits) != 5:
            raise ValueError(f"robot {self.id}: joint_limits needs 5 [min, max] pairs")
        for i, (lo, hi) in enumerate(self.joint_limits):
            if lo > hi:
                raise ValueError(f"robot {self.id}: joint {i + 1} limit min > max")
        for name, vec in self.presets.items():
            bad = JointVector(tuple(vec)).check_limits(self.joint_limits)
            if bad is not None:
                raise ValueError(
                    f"robot {self.id}: preset {name} joint {bad[0] + 1} = {bad[1]} outside limits"
                )

    def preset(self, name: str) -> JointVector:
        if name not in self.presets:
            raise KeyError(f"robot {self.id} has no preset {name!r}")
        return JointVector(tuple(self.presets[name]))


@dataclass
class RobotState:
    """Live robot state owned by the engine; snapshots are deep-ish copies."""

    id: str
    kind: RobotKind
    pose: Pose2D
    joints: JointVector = ZERO_JOINTS
    gripper: GripperState = GripperState.OPEN
    attached_object: Optional[str] = None
    photo_count: int = 0
    trajectory: list = field(default_factory=list)  # [(tick, Pose2D), ...]

    def copy(self) -> "RobotState":
        return replace(self, trajectory=list(self.trajectory))


@dataclass(frozen=True)
class SceneObject:
    id: str
    shape: ObjectShape
    position: tuple[float, float]
    radius_or_halfextent: float
    movable: bool = False


@dataclass(frozen=True)
class Region:
    id: str
    center: tuple[float, float]
    half_size: tuple[float, float]

    def __post_init__(self):
        hx, hy = self.half_size
        if hx <= 0 or hy <= 0:
            raise ValueError(f"region {self.id}: half sizes must be positive")


def in_region(point: tuple[float, float], region: Region) -> bool:
    """Axis-aligned membership test, boundary inclusive."""
    px, py = point
    cx, cy = region.center
    hx, hy = region.half_size
    return abs(px - cx) <= hx and abs(py - cy) <= hy


@dataclass(frozen=True)
class Scene:
    name: str
    tick_seconds: float
    robots: tuple[RobotConfig, ...]
    objects: tuple[SceneObject, ...] = ()
    regions: tuple[Region, ...] = ()

    def __post_init__(self):
        if self.tick_seconds <= 0:
            raise SceneError("tick_seconds", "must be positive")
        seen: set[str] = set()
        for kind, items in (
            ("robots", self.robots),
            ("objects", self.objects),
            ("regions", self.regions),
        ):
            for item in items:
                if item.id in seen:
                    raise SceneError(f"{kind}[{item.id}].id", f"duplicate id {item.id!r}")
                seen.add(item.id)

    def robot(self, robot_id: str) -> RobotConfig:
        for r in self.robots:
            if r.id == robot_id:
                return r
        raise KeyError(f"no robot {robot_id!r} in scene {self.name!r}")

    def object(self, object_id: str) -> SceneObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(f"no object {object_id!r} in scene {self.name!r}")

    def region(self, region_id: str) -> Region:
        for g in self.regions:
            if g.id == region_id:
                return g
        raise KeyError(f"no region {region_id!r} in scene {self.name!r}")

    def robot_ids(self) -> list[str]:
        return [r.id for r in self.robots]


# --- scene (de)serialization -------------------------------------------------

def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise SceneError(f"{path}.{key}" if path else key, "missing required field")
    return mapping[key]


def _load_robot(entry: dict, path: str) -> RobotConfig:
    rid = _require(entry, "id", path)
    kind_raw = _require(entry, "kind", path)
    try:
        kind = RobotKind(kind_raw)
    except ValueError:
        raise SceneError(f"{path}.kind", f"unknown robot kind {kind_raw!r}") from None
    pose_raw = _require(entry, "pose", path)
    try:
        pose = Pose2D(float(pose_raw["x"]), float(pose_raw["y"]), float(pose_raw.get("heading", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"{path}.pose", str(exc)) from None
    limits_raw = entry.get("joint_limits")
    limits = (
        tuple((float(lo), float(hi)) for lo, hi in limits_raw)
        if limits_raw is not None
        else DEFAULT_JOINT_LIMITS
    )
    presets = {name: [float(v) for v in vec] for name, vec in entry.get("presets", {}).items()}
    speed_raw = entry.get("speed", {})
    decel_raw = entry.get("decel", {})
    try:
        return RobotConfig(
            id=rid,
            kind=kind,
            pose=pose,
            joint_limits=limits,
            presets=presets,
            speed=SpeedLimits(
                linear_mps=float(speed_raw.get("linear_mps", 0.5)),
                angular_dps=float(speed_raw.get("angular_dps", 45.0)),
                joint_dps=float(speed_raw.get("joint_dps", 90.0)),
            ),
            decel=DecelSettings(
                window_m=float(decel_raw.get("window_m", 1.4)),
                stop_tol_m=float(decel_raw.get("stop_tol_m", 0.01)),
                angular_window_deg=float(decel_raw.get("angular_window_deg", 40.0)),
                angular_stop_tol_deg=float(decel_raw.get("angular_stop_tol_deg", 0.5)),
            ),
        )
    except ValueError as exc:
        raise SceneError(path, str(exc)) from None


def load_scene(document: str) -> Scene:
    """Parse and validate a JSON scene document.

    Raises SceneError naming the offending field on any schema violation,
    duplicate id, or nonpositive tick.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SceneError("document", f"not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SceneError("document", "top level must be an object")

    name = _require(raw, "name", "")
    tick = _require(raw, "tick_seconds", "")
    try:
        tick = float(tick)
    except (TypeError, ValueError):
        raise SceneError("tick_seconds", f"not a number: {tick!r}") from None

    robots = []
    for i, entry in enumerate(_require(raw, "robots", "")):
        robots.append(_load_robot(entry, f"robots[{i}]"))

    objects = []
    for i, entry in enumerate(raw.get("objects", [])):
        path = f"objects[{i}]"
        try:
            objects.append(
                SceneObject(
                    id=_require(entry, "id", path),
                    shape=ObjectShape(entry.get("shape", "box")),
                    position=(float(entry["position"][0]), float(entry["position"][1])),
                    radius_or_halfextent=float(entry.get("radius_or_halfextent", 0.05)),
                    movable=bool(entry.get("movable", False)),
                )
            )
        except SceneError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SceneError(path, str(exc)) from None

    regions = []
    for i, entry in enumerate(raw.get("regions", [])):
        path = f"regions[{i}]"
        try:
            regions.append(
                Region(
                    id=_require(entry, "id", path),
                    center=(float(entry["center"][0]), float(entry["center"][1])),
                    half_size=(float(entry["half_size"][0]), float(entry["half_size"][1])),
                )
            )
        except SceneError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SceneError(path, str(exc)) from None

    return Scene(
        name=name,
        tick_seconds=tick,
        robots=tuple(robots),
        objects=tuple(objects),
        regions=tuple(regions),
    )


def load_scene_file(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scene(fh.read())


def scene_to_json(scene: Scene) -> str:
    """Serialize a scene back to its JSON document form (load round-trips)."""
    doc = {
        "name": scene.name,
        "tick_seconds": scene.tick_seconds,
        "robots": [
            {
                "id": r.id,
                "kind": r.kind.value,
                "pose": {"x": r.pose.x, "y": r.pose.y, "heading": r.pose.heading},
                "joint_limits": [[lo, hi] for lo, hi in r.joint_limits],
                "presets": {name: list(vec) for name, vec in r.presets.items()},
                "speed": {
                    "linear_mps": r.speed.linear_mps,
                    "angular_dps": r.speed.angular_dps,
                    "joint_dps": r.speed.joint_dps,
                },
                "decel": {
                    "window_m": r.decel.window_m,
                    "stop_tol_m": r.decel.stop_tol_m,
                    "angular_window_deg": r.decel.angular_window_deg,
                    "angular_stop_tol_deg": r.decel.angular_stop_tol_deg,
                },
            }
            for r in scene.robots
        ],
        "objects": [
            {
                "id": o.id,
                "shape": o.shape.value,
                "position": list(o.position),
                "radius_or_halfextent": o.radius_or_halfextent,
                "movable": o.movable,
            }
            for o in scene.objects
        ],
        "regions": [
            {"id": g.id, "center": list(g.center), "half_size": list(g.half_size)}
            for g in scene.regions
        ],
    }
    return json.dumps(doc, indent=2)
