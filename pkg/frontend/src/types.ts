// Wire shapes as the gateway sends them. Field names match the JSON exactly.

export interface RobotView {
  id: string;
  kind: string; // camera_bot | box_bot | arm_bot
  x: number;
  y: number;
  heading: number; // degrees in [-180, 180)
  joints: number[];
  gripper: string; // open | closed
  attached: string | null;
  photo_count: number;
}

export interface ObjectView {
  id: string;
  shape: string; // box | cylinder
  x: number;
  y: number;
  radius_or_halfextent: number;
  movable: boolean;
}

export interface RegionView {
  id: string;
  center: number[];
  half_size: number[];
}

export interface SnapshotEntry {
  object: string;
  range: number;
  bearing: number;
}

export interface SnapshotView {
  tick: number;
  robot: string;
  pose: { x: number; y: number; heading: number };
  entries: SnapshotEntry[];
}

export interface EventView {
  tick: number;
  robot: string;
  kind: string;
  payload: string | null;
}

export interface WorldSnapshot {
  tick: number;
  robots: RobotView[];
  objects: ObjectView[];
  regions: RegionView[];
  snapshots: SnapshotView[];
}

export interface ActivityRow {
  status: string; // running | completed | fault | timeout
  command: string | null;
  calls_completed: number;
  calls_total: number;
}

export type ActivityMap = Record<string, ActivityRow>;

/** One message from /ws/state. "state" replaces the snapshot; "status"
 * carries command-finished transitions between snapshots. */
export interface StreamMessage {
  type: "state" | "status";
  state?: WorldSnapshot;
  events?: EventView[];
  events_dropped?: number;
  activity?: ActivityMap;
  tick?: number;
  finished?: { robot: string; command: string | null; status: string }[];
}

export interface CommandReply {
  status: string; // executing | parse_failed | bind_failed | backend_error | rejected
  command_id?: string;
  backend?: string;
  latency_s?: number;
  script?: string;
  prompt?: string;
  plan?: string;
  robots?: string[];
  error?: string;
  error_line?: number;
}

export interface ManualReply {
  status: string; // accepted | rejected
  mode?: string;
  call?: string;
  error?: string;
}

export interface RobotConfigView {
  id: string;
  kind: string;
  has_arm: boolean;
  has_camera: boolean;
  joint_limits: number[][];
  presets: string[];
  speed: { linear_mps: number; angular_dps: number; joint_dps: number };
}

export interface SceneConfig {
  scene: string;
  tick_seconds: number;
  jog_duration_max_s: number;
  robots: RobotConfigView[];
}

export interface TimingRow {
  session: string;
  command_id: string;
  mode: string;
  task: string | null;
  operation_seconds: number | null;
}
