// Client-side mirror of the gateway's capability and limit checks, so a
// control that could only be rejected is disabled instead of clickable.

import type { RobotConfigView } from "./types.js";

export type Control =
  | "base_jog"
  | "base_move"
  | "arm_set"
  | "arm_preset"
  | "gripper"
  | "capture_photo";

export function enabledControls(kind: string): Set<Control> {
  const controls = new Set<Control>(["base_jog", "base_move"]);
  if (kind === "arm_bot") {
    controls.add("arm_set");
    controls.add("arm_preset");
    controls.add("gripper");
  }
  if (kind === "camera_bot") {
    controls.add("capture_photo");
  }
  return controls;
}

export function controlEnabled(kind: string, control: Control): boolean {
  return enabledControls(kind).has(control);
}

/** Clamp one joint slider value to the scene-configured limit pair. */
export function clampJoint(value: number, index: number, limits: number[][]): number {
  const pair = limits[index];
  if (!pair) return value;
  const [lo, hi] = pair;
  return Math.min(hi, Math.max(lo, value));
}

export interface JogRequest {
  vx: number;
  vy: number;
  omega: number;
  duration: number;
}

/** Clamp jog velocities to the robot's speed limits and the duration to
 * the gateway's jog window. */
export function clampJog(
  raw: JogRequest,
  config: RobotConfigView,
  maxDurationS: number,
): JogRequest {
  const lin = config.speed.linear_mps;
  const ang = config.speed.angular_dps;
  const clip = (v: number, bound: number) => Math.min(bound, Math.max(-bound, v));
  return {
    vx: clip(raw.vx, lin),
    vy: clip(raw.vy, lin),
    omega: clip(raw.omega, ang),
    duration: Math.min(maxDurationS, Math.max(0.05, raw.duration)),
  };
}
