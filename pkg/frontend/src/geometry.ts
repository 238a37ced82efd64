// World-to-canvas math, kept free of DOM types so it unit-tests in node.
// World frame: +x right, +y up, headings in degrees counterclockwise.
// Canvas frame: +y down, so the projection flips y.

import type { RobotView, WorldSnapshot } from "./types.js";

// Arm geometry mirrors the simulator's configuration constants.
export const LINK_LENGTHS = [0.155, 0.135, 0.218];

export interface Bounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

export function sceneBounds(snapshot: WorldSnapshot, margin = 0.6): Bounds {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const r of snapshot.robots) {
    xs.push(r.x);
    ys.push(r.y);
  }
  for (const o of snapshot.objects) {
    xs.push(o.x);
    ys.push(o.y);
  }
  for (const g of snapshot.regions) {
    xs.push(g.center[0] - g.half_size[0], g.center[0] + g.half_size[0]);
    ys.push(g.center[1] - g.half_size[1], g.center[1] + g.half_size[1]);
  }
  if (xs.length === 0) {
    return { minX: -1, maxX: 1, minY: -1, maxY: 1 };
  }
  return {
    minX: Math.min(...xs) - margin,
    maxX: Math.max(...xs) + margin,
    minY: Math.min(...ys) - margin,
    maxY: Math.max(...ys) + margin,
  };
}

export type Projector = (x: number, y: number) => [number, number];

/** Uniform-scale projection of world bounds onto a width x height canvas,
 * centered, with world +y mapping to screen up. Also returns the scale
 * (pixels per meter) for sizing footprints. */
export function makeProjector(
  bounds: Bounds,
  width: number,
  height: number,
): { project: Projector; scale: number } {
  const spanX = bounds.maxX - bounds.minX;
  const spanY = bounds.maxY - bounds.minY;
  const scale = Math.min(width / spanX, height / spanY);
  const offsetX = (width - spanX * scale) / 2;
  const offsetY = (height - spanY * scale) / 2;
  const project: Projector = (x, y) => [
    offsetX + (x - bounds.minX) * scale,
    height - offsetY - (y - bounds.minY) * scale,
  ];
  return { project, scale };
}

/** Arrow from the robot center along its heading, in world coordinates.
 * Heading 90 points toward world +y. */
export function headingArrow(
  robot: RobotView,
  length: number,
): { from: [number, number]; to: [number, number] } {
  const rad = (robot.heading * Math.PI) / 180;
  return {
    from: [robot.x, robot.y],
    to: [robot.x + length * Math.cos(rad), robot.y + length * Math.sin(rad)],
  };
}

/** Radial arm reach from the pitch chain, matching the simulator's planar
 * forward kinematics: r = sum of link length times sin of accumulated
 * pitch from vertical. Fold (all zeros) gives 0. */
export function armReach(joints: number[]): number {
  const rad = (d: number) => (d * Math.PI) / 180;
  const j2 = rad(joints[1] ?? 0);
  const j23 = j2 + rad(joints[2] ?? 0);
  const j234 = j23 + rad(joints[3] ?? 0);
  return (
    LINK_LENGTHS[0] * Math.sin(j2) +
    LINK_LENGTHS[1] * Math.sin(j23) +
    LINK_LENGTHS[2] * Math.sin(j234)
  );
}

/** Ground segment from base to the end effector projection: reach along
 * heading plus the yaw joint. Null when the arm is effectively stowed. */
export function reachSegment(
  robot: RobotView,
): { from: [number, number]; to: [number, number] } | null {
  const r = armReach(robot.joints);
  if (Math.abs(r) < 1e-6) return null;
  const rad = ((robot.heading + (robot.joints[0] ?? 0)) * Math.PI) / 180;
  return {
    from: [robot.x, robot.y],
    to: [robot.x + r * Math.cos(rad), robot.y + r * Math.sin(rad)],
  };
}
