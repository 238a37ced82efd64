// Top-down scene painter. All geometry comes from geometry.ts; this file
// only issues 2D-context calls, so it stays out of the unit tests.

import { headingArrow, makeProjector, reachSegment, sceneBounds } from "./geometry.js";
import type { ViewState } from "./state.js";

const KIND_COLORS: Record<string, string> = {
  camera_bot: "#2f81f7",
  box_bot: "#d29922",
  arm_bot: "#3fb950",
};

const ROBOT_RADIUS_M = 0.18;

export function paintScene(canvas: HTMLCanvasElement, view: ViewState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || !view.snapshot) return;
  const snapshot = view.snapshot;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#0d1117";
  ctx.fillRect(0, 0, width, height);

  const { project, scale } = makeProjector(sceneBounds(snapshot), width, height);

  // regions first, underneath everything
  for (const region of snapshot.regions) {
    const [cx, cy] = region.center;
    const [hw, hh] = region.half_size;
    const [x0, y0] = project(cx - hw, cy + hh);
    ctx.strokeStyle = "#30363d";
    ctx.setLineDash([6, 4]);
    ctx.strokeRect(x0, y0, 2 * hw * scale, 2 * hh * scale);
    ctx.setLineDash([]);
    ctx.fillStyle = "#8b949e";
    ctx.font = "11px sans-serif";
    ctx.fillText(region.id, x0 + 4, y0 + 13);
  }

  // trajectory trails
  for (const [rid, trail] of view.trails) {
    if (trail.length < 2) continue;
    const robot = snapshot.robots.find((r) => r.id === rid);
    ctx.strokeStyle = (robot && KIND_COLORS[robot.kind]) || "#666";
    ctx.globalAlpha = 0.35;
    ctx.beginPath();
    trail.forEach((p, i) => {
      const [px, py] = project(p.x, p.y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
    ctx.globalAlpha = 1;
  }

  // objects: filled squares for movables, hollow for static
  for (const obj of snapshot.objects) {
    const [px, py] = project(obj.x, obj.y);
    const half = Math.max(3, obj.radius_or_halfextent * scale);
    const attachedTo = snapshot.robots.find((r) => r.attached === obj.id);
    ctx.fillStyle = attachedTo ? "#3fb950" : obj.movable ? "#a371f7" : "#484f58";
    if (obj.shape === "cylinder") {
      ctx.beginPath();
      ctx.arc(px, py, half, 0, Math.PI * 2);
      if (obj.movable) ctx.fill();
      else {
        ctx.strokeStyle = ctx.fillStyle;
        ctx.stroke();
      }
    } else {
      if (obj.movable) ctx.fillRect(px - half, py - half, 2 * half, 2 * half);
      else {
        ctx.strokeStyle = ctx.fillStyle;
        ctx.strokeRect(px - half, py - half, 2 * half, 2 * half);
      }
    }
    ctx.fillStyle = "#8b949e";
    ctx.font = "10px sans-serif";
    ctx.fillText(obj.id, px + half + 2, py + 3);
  }

  // robots: footprint, heading arrow, arm reach, label
  for (const robot of snapshot.robots) {
    const [px, py] = project(robot.x, robot.y);
    const color = KIND_COLORS[robot.kind] ?? "#c9d1d9";
    const radius = Math.max(5, ROBOT_RADIUS_M * scale);

    const reach = reachSegment(robot);
    if (reach) {
      const [ex, ey] = project(reach.to[0], reach.to[1]);
      ctx.strokeStyle = "#3fb950";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(px, py);
      ctx.lineTo(ex, ey);
      ctx.stroke();
      ctx.lineWidth = 1;
    }

    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(px, py, radius, 0, Math.PI * 2);
    ctx.fill();
    if (view.selectedRobot === robot.id) {
      ctx.strokeStyle = "#f0f6fc";
      ctx.lineWidth = 2;
      ctx.stroke();
      ctx.lineWidth = 1;
    }

    const arrow = headingArrow(robot, ROBOT_RADIUS_M * 2.2);
    const [ax, ay] = project(arrow.to[0], arrow.to[1]);
    ctx.strokeStyle = "#f0f6fc";
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(ax, ay);
    ctx.stroke();

    ctx.fillStyle = "#c9d1d9";
    ctx.font = "11px sans-serif";
    ctx.fillText(robot.id, px + radius + 3, py - radius - 3);
  }
}
