"""Natural-language robot control platform with a deterministic kinematic simulator."""

__version__ = "0.1.0"

from .world import (
    Pose2D,
    JointVector,
    RobotKind,
    GripperState,
    RobotConfig,
    RobotState,
    SceneObject,
    Region,
    Scene,
    SceneError,
    normalize_heading,
    in_region,
    load_scene,
    load_scene_file,
    scene_to_json,
)
from .actions import (
    ActionCall,
    ActionScript,
    MultiRobotPlan,
    ParseError,
    parse_script,
    parse_plan,
    extract_code_block,
    pretty_print,
    pretty_print_plan,
    registry_default,
)
from .engine import Engine, RuntimeLimits, run_to_completion

__all__ = [
    "Pose2D",
    "JointVector",
    "RobotKind",
    "GripperState",
    "RobotConfig",
    "RobotState",
    "SceneObject",
    "Region",
    "Scene",
    "SceneError",
    "normalize_heading",
    "in_region",
    "load_scene",
    "load_scene_file",
    "scene_to_json",
    "ActionCall",
    "ActionScript",
    "MultiRobotPlan",
    "ParseError",
    "parse_script",
    "parse_plan",
    "extract_code_block",
    "pretty_print",
    "pretty_print_plan",
    "registry_default",
    "Engine",
    "RuntimeLimits",
    "run_to_completion",
]
