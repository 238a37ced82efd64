#!/usr/bin/env python3
"""Generate the bundled 108-case benchmark dataset.

Authors 36 cases per tier against the threebot scene, with scripts inside the
tier call-count bands (simple 1-2, composite 3-4, complex 5-6). Every case is
executed once through the engine before it is written: its goals must pass and
the measured tick count seeds the per-case timeout. Deterministic end to end;
rerunning produces an identical file.
"""

from __future__ import annotations

import argparse
import json
from importlib import resources
from pathlib import Path

from linguasim.actions import parse_plan
from linguasim.bench import TIER_BANDS, GoalPredicate, evaluate_goal
from linguasim.engine import Engine, ExecStatus
from linguasim.world import load_scene

B1, B2, B3 = "bot1", "bot2", "bot3"
START = {B1: (0.5, 2.0), B2: (-1.5, 2.5), B3: (1.8, -1.2)}  # all heading -90


def g(kind: str, **params) -> dict:
    return {"kind": kind, **params}


def case(cid, tier, instruction, robots, script_lines, goals):
    return {
        "id": cid,
        "tier": tier,
        "instruction": instruction,
        "robots": list(robots),
        "oracle_script": "\n".join(script_lines),
        "goals": goals,
    }


def _ids(prefix: str):
    counter = {"n": 0}

    def next_id():
        counter["n"] += 1
        return f"{prefix}-{counter['n']:02d}"

    return next_id


# --- simple tier: 1-2 calls ------------------------------------------------------


def simple_cases():
    nid = _ids("simp")
    out = []

    for x, phrasing in zip(
        [-2.0, -1.0, 1.5, 2.5],
        [
            "Send bot1 to x = {v:g}.",
            "Drive bot1 along the x axis until it reaches {v:g}.",
            "Move bot1 so its x coordinate becomes {v:g}.",
            "Take bot1 to x position {v:g}.",
        ],
    ):
        out.append(case(
            nid(), "simple", phrasing.format(v=x), [B1],
            [f"moveToX({x:g})"],
            [g("at_xy", robot=B1, x=x, y=START[B1][1], tol=0.05)],
        ))

    for y, phrasing in zip(
        [0.0, 1.0, 3.0, -1.5],
        [
            "Send bot1 to y = {v:g}.",
            "Drive bot1 along the y axis to {v:g}.",
            "Move bot1 until its y coordinate is {v:g}.",
            "Take bot1 down to y position {v:g}.",
        ],
    ):
        out.append(case(
            nid(), "simple", phrasing.format(v=y), [B1],
            [f"moveToY({y:g})"],
            [g("at_xy", robot=B1, x=START[B1][0], y=y, tol=0.05)],
        ))

    for robot, x, y, x_first, phrasing in [
        (B2, 0.0, 1.0, False, "Drive bot2 to position (0, 1)."),
        (B2, 1.0, 0.5, True, "Move bot2 to (1, 0.5), x axis first."),
        (B1, -2.5, 1.5, False, "Send bot1 over to the point (-2.5, 1.5)."),
        (B3, 2.0, -2.0, True, "Drive bot3 to (2, -2), moving in x before y."),
    ]:
        call = f"moveToXY({x:g}, {y:g}, xFirst)" if x_first else f"moveToXY({x:g}, {y:g})"
        out.append(case(
            nid(), "simple", phrasing, [robot], [call],
            [g("at_xy", robot=robot, x=x, y=y, tol=0.05)],
        ))

    for beta, phrasing in zip(
        [0.0, 90.0, 179.0, -135.0],
        [
            "Rotate bot1 to face heading {v:g} degrees.",
            "Turn bot1 to {v:g} degrees.",
            "Point bot1 at heading {v:g}.",
            "Rotate bot1 until its heading reads {v:g} degrees.",
        ],
    ):
        out.append(case(
            nid(), "simple", phrasing.format(v=beta), [B1],
            [f"rotateToBeta({beta:g})"],
            [g("heading_is", robot=B1, beta=beta, tol=1.0)],
        ))

    for d, phrasing in zip(
        [1.0, 2.0, 0.5, -1.0],
        [
            "Drive bot2 forward {v:g} meters.",
            "Move bot2 ahead by {v:g} m.",
            "Advance bot2 {v:g} meters along its heading.",
            "Back bot2 up by one meter.",
        ],
    ):
        # bot2 faces -90 deg, so forward travel reduces y
        out.append(case(
            nid(), "simple", phrasing.format(v=abs(d)), [B2],
            [f"moveForward({d:g})"],
            [g("at_xy", robot=B2, x=START[B2][0], y=START[B2][1] - d, tol=0.05)],
        ))

    for dx, phrasing in zip(
        [1.0, -1.5, 2.5, -0.5],
        [
            "Slide bot1 {v:g} meters in positive x.",
            "Shift bot1 {v:g} m toward negative x.",
            "Move bot1 laterally by {v:g} meters.",
            "Nudge bot1 half a meter in the negative x direction.",
        ],
    ):
        out.append(case(
            nid(), "simple", phrasing.format(v=abs(dx)), [B1],
            [f"moveLateral({dx:g})"],
            [g("at_xy", robot=B1, x=START[B1][0] + dx, y=START[B1][1], tol=0.05)],
        ))

    out.append(case(
        nid(), "simple", "Have bot1 take a photo.", [B1],
        ["capturePhoto()"],
        [g("photos_at_least", robot=B1, n=1)],
    ))
    out.append(case(
        nid(), "simple", "Have bot1 take two photos in a row.", [B1],
        ["capturePhoto()", "capturePhoto()"],
        [g("photos_at_least", robot=B1, n=2)],
    ))

    out.append(case(
        nid(), "simple", "Extend bot3's arm.", [B3],
        ["presetExtend()"],
        [g("arm_at", robot=B3, preset="extend", tol=1.0)],
    ))
    out.append(case(
        nid(), "simple", "Set bot3's arm joints to 0, 45, 30, -20 and 10 degrees.", [B3],
        ["moveArmSequential(0, 45, 30, -20, 10)"],
        [g("arm_at", robot=B3, joints=[0.0, 45.0, 30.0, -20.0, 10.0], tol=1.0)],
    ))
    out.append(case(
        nid(), "simple", "Extend bot3's arm, then fold it back.", [B3],
        ["presetExtend()", "presetFold()"],
        [g("arm_at", robot=B3, preset="fold", tol=1.0)],
    ))

    for d, phrasing in zip(
        [1.0, 1.5],
        [
            "Turn bot3 to heading 0 and drive {v:g} meter forward.",
            "Face bot3 along positive x, then go {v:g} meters ahead.",
        ],
    ):
        out.append(case(
            nid(), "simple", phrasing.format(v=d), [B3],
            ["rotateToBeta(0)", f"moveForward({d:g})"],
            [
                g("at_xy", robot=B3, x=START[B3][0] + d, y=START[B3][1], tol=0.1),
                g("heading_is", robot=B3, beta=0.0, tol=1.0),
            ],
        ))

    for y, phrasing in zip(
        [1.0, -0.5],
        [
            "Move bot1 to y = {v:g} and take a picture there.",
            "Drive bot1 down to y = {v:g}, then photograph the area.",
        ],
    ):
        out.append(case(
            nid(), "simple", phrasing.format(v=y), [B1],
            [f"moveToY({y:g})", "capturePhoto()"],
            [
                g("at_xy", robot=B1, x=START[B1][0], y=y, tol=0.05),
                g("photos_at_least", robot=B1, n=1),
            ],
        ))

    out.append(case(
        nid(), "simple", "Have bot2 face the x direction of -3 and drive there.", [B2],
        ["moveToXWithRotation(-3.0)"],
        [
            g("at_xy", robot=B2, x=-3.0, y=START[B2][1], tol=0.1),
            g("heading_is", robot=B2, beta=-180.0, tol=1.0),
        ],
    ))
    out.append(case(
        nid(), "simple", "Have bot1 rotate toward x = 2 and drive to it.", [B1],
        ["moveToXWithRotation(2.0)"],
        [
            g("at_xy", robot=B1, x=2.0, y=START[B1][1], tol=0.1),
            g("heading_is", robot=B1, beta=0.0, tol=1.0),
        ],
    ))

    out.append(case(
        nid(), "simple", "Reverse bot1 by 1.2 meters.", [B1],
        ["moveForward(-1.2)"],
        [g("at_xy", robot=B1, x=START[B1][0], y=START[B1][1] + 1.2, tol=0.05)],
    ))

    return out


# --- composite tier: 3-4 calls ---------------------------------------------------


def composite_cases():
    nid = _ids("comp")
    out = []

    for y, phrasing in zip(
        [1.0, 0.0, -1.0, 3.2],
        [
            "Photograph the area, move bot1 to y = {v:g}, and photograph again.",
            "Have bot1 take a photo, drive to y = {v:g}, and take another.",
            "bot1: picture, then go to y = {v:g}, then another picture.",
            "Take a photo with bot1, back it up to y = {v:g}, and shoot once more.",
        ],
    ):
        out.append(case(
            nid(), "composite", phrasing.format(v=y), [B1],
            ["capturePhoto()", f"moveToY({y:g})", "capturePhoto()"],
            [
                g("photos_at_least", robot=B1, n=2),
                g("at_xy", robot=B1, x=START[B1][0], y=y, tol=0.05),
            ],
        ))

    for x, y, beta, phrasing in [
        (-1.0, 1.0, 0.0, "Move bot1 to x = -1, then y = 1, then face heading 0."),
        (2.0, 0.0, 90.0, "Drive bot1 to x = 2 and y = 0, finishing pointed at 90 degrees."),
        (1.5, 3.0, -90.0, "Send bot1 to (1.5, 3) one axis at a time and face -90."),
        (-2.0, -1.0, 179.0, "bot1: go to x = -2, then y = -1, then rotate to 179 degrees."),
    ]:
        out.append(case(
            nid(), "composite", phrasing, [B1],
            [f"moveToX({x:g})", f"moveToY({y:g})", f"rotateToBeta({beta:g})"],
            [
                g("at_xy", robot=B1, x=x, y=y, tol=0.05),
                g("heading_is", robot=B1, beta=beta, tol=1.0),
            ],
        ))

    for x, y, lat, phrasing in [
        (2.4, 0.9, 0.6, "Have bot2 scoop the obstacle box and push it into the parking zone."),
        (2.5, 0.8, 0.4, "bot2: capture the obstacle in your frame and deliver it to parking."),
        (2.4, 0.7, 0.5, "Push the obstacle box into the parking area with bot2."),
        (2.6, 0.9, 0.3, "Use bot2 to ferry the obstacle box over to its parking region."),
    ]:
        out.append(case(
            nid(), "composite", phrasing, [B2],
            [
                "moveToY(0.6)",
                f"moveToXY({x:g}, {y:g}, xFirst)",
                f"moveLateral({lat:g})",
            ],
            [
                g("in_region", target="obstacle_box", region="parking_box"),
                g("at_xy", robot=B2, x=x + lat, y=y, tol=0.05),
            ],
        ))

    out.append(case(
        nid(), "composite", "Have bot3 approach the target cube, extend its arm, and grab it.", [B3],
        ["moveToY(-2.5)", "presetExtend()", "closeGripper()"],
        [g("holding", robot=B3, object="target_cube")],
    ))
    out.append(case(
        nid(), "composite",
        "bot3: drive near the cube, fold then extend the arm, and close the gripper on it.", [B3],
        ["moveToY(-2.5)", "presetFold()", "presetExtend()", "closeGripper()"],
        [g("holding", robot=B3, object="target_cube")],
    ))

    for d1, dx, d2, phrasing in [
        (1.0, 1.0, 0.5, "bot1 patrol: forward 1 m, slide 1 m in x, forward another 0.5 m."),
        (2.0, -1.5, 1.0, "Run bot1 forward 2 m, shift -1.5 m laterally, then forward 1 m."),
        (0.5, 2.0, 1.5, "Move bot1 ahead 0.5 m, laterally 2 m, then ahead 1.5 m."),
        (1.5, 0.5, -1.0, "bot1: forward 1.5 m, sidestep 0.5 m, then reverse 1 m."),
    ]:
        # heading -90 throughout: forward legs subtract from y
        out.append(case(
            nid(), "composite", phrasing, [B1],
            [f"moveForward({d1:g})", f"moveLateral({dx:g})", f"moveForward({d2:g})"],
            [g("at_xy", robot=B1, x=START[B1][0] + dx, y=START[B1][1] - d1 - d2, tol=0.1)],
        ))

    for d, phrasing in zip(
        [2.0, 3.0, 1.5],
        [
            "Turn bot2 to heading 0, drive {v:g} m, then face -90 again.",
            "bot2: face +x, advance {v:g} meters, then rotate back to -90 degrees.",
            "Rotate bot2 to 0, move {v:g} m forward, then turn to heading -90.",
        ],
    ):
        out.append(case(
            nid(), "composite", phrasing.format(v=d), [B2],
            ["rotateToBeta(0)", f"moveForward({d:g})", "rotateToBeta(-90)"],
            [
                g("at_xy", robot=B2, x=START[B2][0] + d, y=START[B2][1], tol=0.1),
                g("heading_is", robot=B2, beta=-90.0, tol=1.0),
            ],
        ))

    for dx, phrasing in zip(
        [-1.0, 1.5, 2.0],
        [
            "bot1: photo, slide {v:g} m in x, photo again, then return to (0.5, 2).",
            "Take a photo, shift bot1 by {v:g} m laterally, photograph, and go back to start.",
            "Photograph, move bot1 {v:g} m in x, photograph, then return to its origin.",
        ],
    ):
        out.append(case(
            nid(), "composite", phrasing.format(v=dx), [B1],
            ["capturePhoto()", f"moveLateral({dx:g})", "capturePhoto()", "moveToXY(0.5, 2.0, xFirst)"],
            [
                g("photos_at_least", robot=B1, n=2),
                g("at_xy", robot=B1, x=0.5, y=2.0, tol=0.05),
            ],
        ))

    out.append(case(
        nid(), "composite", "Extend bot3's arm, sweep the joints, then fold it away.", [B3],
        ["presetExtend()", "moveArmSequential(0, 60, 30, -45, 0)", "presetFold()"],
        [g("arm_at", robot=B3, preset="fold", tol=1.0)],
    ))
    out.append(case(
        nid(), "composite", "Fold bot3's arm, run the joints to a test pose, then extend it.", [B3],
        ["presetFold()", "moveArmSequential(0, 30, 45, -30, 15)", "presetExtend()"],
        [g("arm_at", robot=B3, preset="extend", tol=1.0)],
    ))

    for x, y, beta, phrasing in [
        (1.0, -1.5, 90.0, "Reposition bot3 to (1, -1.5), face 90 degrees, and extend its arm."),
        (2.5, -0.5, 0.0, "Move bot3 to (2.5, -0.5), rotate to heading 0, and extend the arm."),
    ]:
        out.append(case(
            nid(), "composite", phrasing, [B3],
            [f"moveToXY({x:g}, {y:g})", f"rotateToBeta({beta:g})", "presetExtend()"],
            [
                g("at_xy", robot=B3, x=x, y=y, tol=0.05),
                g("heading_is", robot=B3, beta=beta, tol=1.0),
                g("arm_at", robot=B3, preset="extend", tol=1.0),
            ],
        ))

    for x, y, phrasing in [
        (0.0, 0.4, "bot2: drop to y = 0.6, head to (0, 0.4) x first, then face heading 0."),
        (-0.5, 0.5, "Drive bot2 to y = 0.6, then to (-0.5, 0.5) moving x first, then turn to 0."),
    ]:
        out.append(case(
            nid(), "composite", phrasing, [B2],
            ["moveToY(0.6)", f"moveToXY({x:g}, {y:g}, xFirst)", "rotateToBeta(0)"],
            [
                g("at_xy", robot=B2, x=x, y=y, tol=0.05),
                g("heading_is", robot=B2, beta=0.0, tol=1.0),
            ],
        ))

    for x, y, beta, phrasing in [
        (-1.5, 0.5, 0.0, "Send bot1 to (-1.5, 0.5) x first, face 0 degrees, and take a photo."),
        (2.0, 1.0, 90.0, "bot1: go to (2, 1) moving x first, rotate to 90, photograph."),
        (0.0, 3.0, -135.0, "Move bot1 to (0, 3) x first, turn to -135 degrees, and shoot a photo."),
        (1.0, -1.0, 179.0, "bot1 to (1, -1), x axis first; face 179 degrees; capture an image."),
    ]:
        out.append(case(
            nid(), "composite", phrasing, [B1],
            [f"moveToXY({x:g}, {y:g}, xFirst)", f"rotateToBeta({beta:g})", "capturePhoto()"],
            [
                g("at_xy", robot=B1, x=x, y=y, tol=0.05),
                g("heading_is", robot=B1, beta=beta, tol=1.0),
                g("photos_at_least", robot=B1, n=1),
            ],
        ))

    for d1, d2, lat, phrasing in [
        (2.0, -1.0, 1.5, "bot2: forward 2 m, back 1 m, then shift 1.5 m in x."),
        (1.5, -0.5, -1.0, "Drive bot2 ahead 1.5 m, reverse 0.5 m, then slide -1 m laterally."),
    ]:
        out.append(case(
            nid(), "composite", phrasing, [B2],
            [f"moveForward({d1:g})", f"moveForward({d2:g})", f"moveLateral({lat:g})"],
            [g("at_xy", robot=B2, x=START[B2][0] + lat, y=START[B2][1] - d1 - d2, tol=0.1)],
        ))

    return out


# --- complex tier: 5-6 calls -----------------------------------------------------


def complex_cases():
    nid = _ids("cplx")
    out = []

    for dx, phrasing in zip(
        [-1.0, 2.0, 1.5, -0.5, 1.0],
        [
            "bot1 survey: photo, drive to y = -0.5, photo, slide {v:g} m in x, photo, return to (0.5, 2).",
            "Run a bot1 survey with three photos, a lateral leg of {v:g} m, ending back at its start.",
            "bot1: photograph, go to y = -0.5, photograph, shift {v:g} m in x, photograph, return home.",
            "Survey with bot1: three pictures along a path with a {v:g} m side leg, then return to (0.5, 2).",
            "Have bot1 shoot three photos along a loop with a {v:g} m lateral leg and come back to start.",
        ],
    ):
        out.append(case(
            nid(), "complex", phrasing.format(v=dx), [B1],
            [
                "capturePhoto()",
                "moveToY(-0.5)",
                "capturePhoto()",
                f"moveLateral({dx:g})",
                "capturePhoto()",
                "moveToXY(0.5, 2.0, xFirst)",
            ],
            [
                g("photos_at_least", robot=B1, n=3),
                g("at_xy", robot=B1, x=0.5, y=2.0, tol=0.05),
            ],
        ))

    for park_x, fold_first, phrasing in [
        (-2.2, False, "bot3: fetch the target cube and carry it into the arm parking region."),
        (-2.3, False, "Have bot3 grasp the cube and park inside its parking area while holding it."),
        (-2.2, True, "bot3: fold the arm, then grab the target cube and bring it to the parking region."),
        (-2.4, True, "Pick up the cube with bot3 (folding first) and drive into the parking zone."),
    ]:
        script = ["moveToY(-2.5)"]
        if fold_first:
            script.append("presetFold()")
        script += ["presetExtend()", "closeGripper()", "moveToY(-0.5)", f"moveToXWithRotation({park_x:g})"]
        out.append(case(
            nid(), "complex", phrasing, [B3], script,
            [
                g("holding", robot=B3, object="target_cube"),
                g("in_region", target="target_cube", region="parking_arm"),
                g("in_region", target=B3, region="parking_arm"),
            ],
        ))

    for park_x, phrasing in [
        (-2.3, "bot3: grasp the cube, carry it to the parking region, and release it there."),
        (-2.5, "Have bot3 deliver the target cube into the arm parking area and let it go."),
        (-2.4, "Fetch the cube with bot3, drop it off inside the parking region, and open the gripper."),
    ]:
        out.append(case(
            nid(), "complex", phrasing, [B3],
            [
                "moveToY(-2.5)",
                "presetExtend()",
                "closeGripper()",
                "moveToY(-0.5)",
                f"moveToXWithRotation({park_x:g})",
                "openGripper()",
            ],
            [
                g("in_region", target="target_cube", region="parking_arm"),
                g("in_region", target=B3, region="parking_arm"),
            ],
        ))

    for final_x, final_y, phrasing in [
        (0.5, 2.0, "bot2: push the obstacle into parking, turn to 90, and withdraw to (0.5, 2)."),
        (-0.5, 1.8, "Deliver the obstacle box to parking with bot2, then rotate away and retreat to (-0.5, 1.8)."),
    ]:
        out.append(case(
            nid(), "complex", phrasing, [B2],
            [
                "moveToY(0.6)",
                "moveToXY(2.4, 0.9, xFirst)",
                "moveLateral(0.6)",
                "rotateToBeta(90)",
                f"moveToY({final_y:g})",
                f"moveToX({final_x:g})",
            ],
            [
                g("in_region", target="obstacle_box", region="parking_box"),
                g("at_xy", robot=B2, x=final_x, y=final_y, tol=0.05),
            ],
        ))

    zigzags = [
        (1.0, 1.0, -180.0, None),
        (2.0, 1.5, 90.0, None),
        (1.5, 2.0, 0.0, None),
        (1.0, 0.5, -90.0, 0.5),
        (0.5, 1.0, 179.0, -1.0),
        (2.5, 2.5, -135.0, None),
    ]
    for i, (d1, d2, b3, lat) in enumerate(zigzags):
        script = [
            "rotateToBeta(0)",
            f"moveForward({d1:g})",
            "rotateToBeta(-90)",
            f"moveForward({d2:g})",
            f"rotateToBeta({b3:g})",
        ]
        fx, fy = START[B1][0] + d1, START[B1][1] - d2
        if lat is not None:
            script.append(f"moveLateral({lat:g})")
            fx += lat
        phrasing = (
            f"bot1 zigzag {i + 1}: east {d1:g} m, south {d2:g} m, finish at heading {b3:g}"
            + (f", then slide {lat:g} m in x." if lat is not None else ".")
        )
        out.append(case(
            nid(), "complex", phrasing, [B1], script,
            [
                g("at_xy", robot=B1, x=fx, y=fy, tol=0.12),
                g("heading_is", robot=B1, beta=b3, tol=1.0),
            ],
        ))

    out.append(case(
        nid(), "complex",
        "bot1 photographs before and after moving to y = 1 while bot3 turns east and advances 1 m.",
        [B1, B3],
        [
            f"@robot {B1}",
            "capturePhoto()",
            "moveToY(1.0)",
            "capturePhoto()",
            f"@robot {B3}",
            "rotateToBeta(0)",
            "moveForward(1.0)",
        ],
        [
            g("photos_at_least", robot=B1, n=2),
            g("at_xy", robot=B1, x=START[B1][0], y=1.0, tol=0.05),
            g("at_xy", robot=B3, x=START[B3][0] + 1.0, y=START[B3][1], tol=0.1),
        ],
    ))
    out.append(case(
        nid(), "complex",
        "Send bot1 to x = -1 for a photo while bot2 runs forward 1.5 m, slides 1 m, and advances 0.5 m.",
        [B1, B2],
        [
            f"@robot {B1}",
            "moveToX(-1.0)",
            "capturePhoto()",
            f"@robot {B2}",
            "moveForward(1.5)",
            "moveLateral(1.0)",
            "moveForward(0.5)",
        ],
        [
            g("at_xy", robot=B1, x=-1.0, y=START[B1][1], tol=0.05),
            g("photos_at_least", robot=B1, n=1),
            g("at_xy", robot=B2, x=START[B2][0] + 1.0, y=START[B2][1] - 2.0, tol=0.1),
        ],
    ))
    out.append(case(
        nid(), "complex",
        "bot2 parks at (0, 1) facing east while bot3 approaches y = -2, extends, and sets joints 0/45/45/0/0.",
        [B2, B3],
        [
            f"@robot {B2}",
            "moveToXY(0.0, 1.0, xFirst)",
            "rotateToBeta(0)",
            f"@robot {B3}",
            "moveToY(-2.0)",
            "presetExtend()",
            "moveArmSequential(0, 45, 45, 0, 0)",
        ],
        [
            g("at_xy", robot=B2, x=0.0, y=1.0, tol=0.05),
            g("heading_is", robot=B2, beta=0.0, tol=1.0),
            g("at_xy", robot=B3, x=START[B3][0], y=-2.0, tol=0.05),
            g("arm_at", robot=B3, joints=[0.0, 45.0, 45.0, 0.0, 0.0], tol=1.0),
        ],
    ))

    tours = [
        (0.0, 1.5, 2.0, 1.5, -1.0),
        (0.5, 2.0, 1.5, 1.0, 0.5),
        (-0.5, 1.2, 2.5, 2.0, -0.5),
        (1.0, 1.8, 1.0, 1.5, 1.0),
        (0.0, 2.2, 2.0, 2.5, -1.5),
    ]
    for i, (x0, y0, d1, d2, lat) in enumerate(tours):
        fx, fy = x0 + d1 + lat, y0 - d2
        out.append(case(
            nid(), "complex",
            f"bot2 tour {i + 1}: to ({x0:g}, {y0:g}) x first, east {d1:g} m, south {d2:g} m, "
            f"then {lat:g} m laterally.",
            [B2],
            [
                f"moveToXY({x0:g}, {y0:g}, xFirst)",
                "rotateToBeta(0)",
                f"moveForward({d1:g})",
                "rotateToBeta(-90)",
                f"moveForward({d2:g})",
                f"moveLateral({lat:g})",
            ],
            [
                g("at_xy", robot=B2, x=fx, y=fy, tol=0.15),
                g("heading_is", robot=B2, beta=-90.0, tol=1.0),
            ],
        ))

    for x, y, phrasing in [
        (2.0, -2.0, "bot3 choreography at (2, -2): extend, sweep joints, fold, face north, advance 0.8 m."),
        (1.0, -2.5, "Move bot3 to (1, -2.5); run extend, a joint sweep, fold; then turn to 90 and go 0.8 m."),
    ]:
        out.append(case(
            nid(), "complex", phrasing, [B3],
            [
                f"moveToXY({x:g}, {y:g})",
                "presetExtend()",
                "moveArmSequential(45, 60, 20, -30, 0)",
                "presetFold()",
                "rotateToBeta(90)",
                "moveForward(0.8)",
            ],
            [
                g("at_xy", robot=B3, x=x, y=y + 0.8, tol=0.1),
                g("arm_at", robot=B3, preset="fold", tol=1.0),
                g("heading_is", robot=B3, beta=90.0, tol=1.0),
            ],
        ))

    perimeters = [
        (-2.0, 3.0, 2.5, 3.0),
        (-2.5, 3.2, 2.0, 3.2),
        (-1.5, 2.8, 3.0, 2.8),
        (-3.0, 3.0, 1.5, 3.0),
    ]
    for i, (x1, y1, x2, y2) in enumerate(perimeters):
        out.append(case(
            nid(), "complex",
            f"bot1 perimeter sweep {i + 1}: photograph at ({x1:g}, {y1:g}) and ({x2:g}, {y2:g}), "
            "then return to (0.5, 2) with a final photo.",
            [B1],
            [
                f"moveToXY({x1:g}, {y1:g}, xFirst)",
                "capturePhoto()",
                f"moveToXY({x2:g}, {y2:g})",
                "capturePhoto()",
                "moveToXY(0.5, 2.0, yFirst)",
                "capturePhoto()",
            ],
            [
                g("photos_at_least", robot=B1, n=3),
                g("at_xy", robot=B1, x=0.5, y=2.0, tol=0.05),
            ],
        ))

    for beta, phrasing in [
        (0.0, "bot3: grab the target cube, fold the arm with it, and turn to heading 0."),
        (90.0, "Have bot3 pick up the cube, stow the arm, and rotate to 90 degrees."),
    ]:
        out.append(case(
            nid(), "complex", phrasing, [B3],
            [
                "moveToY(-2.5)",
                "presetExtend()",
                "closeGripper()",
                "presetFold()",
                f"rotateToBeta({beta:g})",
            ],
            [
                g("holding", robot=B3, object="target_cube"),
                g("arm_at", robot=B3, preset="fold", tol=1.0),
                g("heading_is", robot=B3, beta=beta, tol=1.0),
            ],
        ))

    return out


# --- verification and output ------------------------------------------------------


def verify_case(raw: dict, scene) -> int:
    """Run the case's oracle script; assert goals pass; return ticks used."""
    robots = raw["robots"]
    default = robots[0] if len(robots) == 1 else None
    plan = parse_plan(raw["oracle_script"], default_robot=default)
    lo, hi = TIER_BANDS[raw["tier"]]
    count = plan.total_calls()
    if not (lo <= count <= hi):
        raise SystemExit(f"{raw['id']}: {count} calls outside {raw['tier']} band {lo}-{hi}")
    engine = Engine(scene)
    world, outcomes = engine.run_to_completion(plan)
    for rid, outcome in outcomes.items():
        if outcome.status is not ExecStatus.COMPLETED:
            raise SystemExit(f"{raw['id']}: {rid} ended {outcome.status.value} ({outcome.fault})")
    for goal_raw in raw["goals"]:
        goal = GoalPredicate.from_dict(goal_raw)
        ok, detail = evaluate_goal(goal, world, scene)
        if not ok:
            raise SystemExit(f"{raw['id']}: goal {goal.kind} failed: {detail}")
    return world.tick


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent
        / "src/linguasim/data/datasets/bench108.jsonl",
    )
    args = parser.parse_args()

    scene_text = (
        resources.files("linguasim").joinpath("data/scenes/threebot.json").read_text()
    )
    scene = load_scene(scene_text)

    tiers = {
        "simple": simple_cases(),
        "composite": composite_cases(),
        "complex": complex_cases(),
    }
    for tier, cases in tiers.items():
        if len(cases) != 36:
            raise SystemExit(f"{tier}: built {len(cases)} cases, want 36")

    all_cases = tiers["simple"] + tiers["composite"] + tiers["complex"]
    instructions = [c["instruction"] for c in all_cases]
    if len(set(instructions)) != len(instructions):
        dupes = sorted({i for i in instructions if instructions.count(i) > 1})
        raise SystemExit(f"duplicate instructions: {dupes}")

    for raw in all_cases:
        ticks = verify_case(raw, scene)
        raw["timeout_ticks"] = max(1200, ticks * 3 + 500)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        for raw in all_cases:
            fh.write(json.dumps(raw) + "\n")
    print(f"wrote {len(all_cases)} cases to {args.out}")


if __name__ == "__main__":
    main()
