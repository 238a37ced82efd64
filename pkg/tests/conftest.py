"""Shared fixtures and deterministic generators for the test suite."""

from __future__ import annotations

import random
from importlib import resources

import pytest

from linguasim.actions import ActionCall, ActionScript, parse_plan
from linguasim.world import Scene, load_scene_file

SCENE_PATH = str(resources.files("linguasim").joinpath("data/scenes/threebot.json"))
DATASET_PATH = str(resources.files("linguasim").joinpath("data/datasets/bench108.jsonl"))
GOLDEN_PLAN_PATH = str(resources.files("linguasim").joinpath("data/plans/threebot_demo.txt"))


@pytest.fixture
def scene() -> Scene:
    return load_scene_file(SCENE_PATH)


@pytest.fixture
def golden_plan():
    with open(GOLDEN_PLAN_PATH, "r", encoding="utf-8") as fh:
        return parse_plan(fh.read())


# --- random script generation ---------------------------------------------------
# Hand-rolled instead of hypothesis so the acceptance suite can demand exact
# counts (1000 scripts) under a fixed seed with sub-second runtimes.

def _random_call(rng: random.Random) -> ActionCall:
    pick = rng.randrange(13)
    if pick == 0:
        return ActionCall("moveForward", (round(rng.uniform(-10, 10), 3),))
    if pick == 1:
        return ActionCall("moveLateral", (round(rng.uniform(-10, 10), 3),))
    if pick == 2:
        return ActionCall("moveToX", (round(rng.uniform(-50, 50), 3),))
    if pick == 3:
        return ActionCall("moveToY", (round(rng.uniform(-50, 50), 3),))
    if pick == 4:
        args = [round(rng.uniform(-50, 50), 3), round(rng.uniform(-50, 50), 3)]
        order = rng.randrange(3)
        if order == 1:
            args.append("xFirst")
        elif order == 2:
            args.append("yFirst")
        return ActionCall("moveToXY", tuple(args))
    if pick == 5:
        return ActionCall("moveToXWithRotation", (round(rng.uniform(-50, 50), 3),))
    if pick == 6:
        return ActionCall("rotateToBeta", (round(rng.uniform(-180, 179.99), 2),))
    if pick == 7:
        return ActionCall(
            "moveArmSequential",
            tuple(round(rng.uniform(-160, 160), 2) for _ in range(5)),
        )
    name = ("presetFold", "presetExtend", "openGripper", "closeGripper", "capturePhoto")[pick - 8]
    return ActionCall(name, ())


def random_script(rng: random.Random, max_calls: int = 8) -> ActionScript:
    n = rng.randint(1, max_calls)
    return ActionScript(calls=tuple(_random_call(rng) for _ in range(n)))


def mutate_script_text(text: str, rng: random.Random) -> tuple[str, int]:
    """Break one token on one line; returns (mutated text, 1-based line)."""
    lines = text.splitlines()
    k = rng.randrange(len(lines))
    line = lines[k]
    name, rest = line.split("(", 1)
    kind = rng.randrange(3)
    if kind == 0:
        line = "doSomersault(" + rest  # unknown primitive
    elif kind == 1:
        line = f"{name}({rest[:-1]}, 999999){'' if rest.endswith(')') else ')'}"  # extra arg
    else:
        line = f"{name}(wat)"  # garbage token
    lines[k] = line
    return "\n".join(lines), k + 1
