"""Whitelisted action language: registry, parser, validator, printer.

The on-the-wire script format: one call per line, `name(arg, ...)`, with an
optional `@robot <id>` header line per robot section, `#` comments, and blank
lines ignored. Arguments are decimal numerals, true/false, or the bare
keyword tokens xFirst/yFirst. First error aborts the parse (fail-fast).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


class ParamKind(str, Enum):
    NUMBER = "number"
    BOOLEAN = "boolean"
    KEYWORD = "keyword"


KEYWORD_TOKENS = ("xFirst", "yFirst")


@dataclass(frozen=True)
class Param:
    name: str
    kind: ParamKind
    range: Optional[tuple[float, float]] = None  # closed interval, numbers only
    optional: bool = False

    def domain(self) -> str:
        if self.kind is ParamKind.NUMBER:
            if self.range:
                return f"[{self.range[0]}, {self.range[1]}]"
            return "a number"
        if self.kind is ParamKind.BOOLEAN:
            return "true/false"
        return "/".join(KEYWORD_TOKENS)


@dataclass(frozen=True)
class PrimitiveSignature:
    name: str
    params: tuple[Param, ...] = ()
    variadic: bool = False
    summary: str = ""

    @property
    def min_arity(self) -> int:
        return sum(1 for p in self.params if not p.optional)

    @property
    def max_arity(self) -> int:
        return len(self.params)


def _num(name: str, rng: Optional[tuple[float, float]] = None, optional: bool = False) -> Param:
    return Param(name, ParamKind.NUMBER, rng, optional)


_V1_PRIMITIVES = (
    PrimitiveSignature(
        "moveForward",
        (_num("distance_m", (-10.0, 10.0)),),
        summary="drive along the current heading by distance_m meters (negative backs up)",
    ),
    PrimitiveSignature(
        "moveLateral",
        (_num("dx_m", (-10.0, 10.0)),),
        summary="slide dx_m meters along the world x axis, heading held",
    ),
    PrimitiveSignature(
        "moveToX",
        (_num("x_m"),),
        summary="drive to world x = x_m, holding y and heading",
    ),
    PrimitiveSignature(
        "moveToY",
        (_num("y_m"),),
        summary="drive to world y = y_m, holding x and heading",
    ),
    PrimitiveSignature(
        "moveToXY",
        (_num("x_m"), _num("y_m"), Param("order", ParamKind.KEYWORD, optional=True)),
        summary="drive to (x_m, y_m) one axis at a time; y first unless the optional xFirst keyword is given",
    ),
    PrimitiveSignature(
        "moveToXWithRotation",
        (_num("x_m"),),
        summary="rotate to face the target x direction, then drive along the x axis to x_m",
    ),
    PrimitiveSignature(
        "rotateToBeta",
        (_num("beta_deg", (-180.0, 180.0)),),
        summary="rotate in place to absolute heading beta_deg degrees",
    ),
    PrimitiveSignature(
        "moveArmSequential",
        tuple(_num(f"j{i}_deg") for i in range(1, 6)),
        summary="move the five arm joints to the given angles in degrees (per-robot limits apply)",
    ),
    PrimitiveSignature("presetFold", summary="snap the arm to the configured fold posture"),
    PrimitiveSignature("presetExtend", summary="snap the arm to the configured extend posture"),
    PrimitiveSignature("openGripper", summary="open the gripper, releasing any held object"),
    PrimitiveSignature("closeGripper", summary="close the gripper, grasping an object in reach"),
    PrimitiveSignature("capturePhoto", summary="record a camera snapshot of objects ahead"),
)

_REGISTRY = {sig.name: sig for sig in _V1_PRIMITIVES}

# rotateToBeta's interval is half-open [-180, 180): +180 itself normalizes
# to -180 and is rejected to keep one canonical spelling per heading.
_HALF_OPEN_MAX = {"rotateToBeta"}


def registry_default() -> list[PrimitiveSignature]:
    """The v1 primitive set, in a stable order."""
    return list(_V1_PRIMITIVES)


def lookup(name: str) -> Optional[PrimitiveSignature]:
    return _REGISTRY.get(name)


# --- parse errors -------------------------------------------------------------

class ParseError(ValueError):
    """Base for all script parse failures; carries the 1-based source line."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ScriptSyntaxError(ParseError):
    pass


class UnknownPrimitive(ParseError):
    def __init__(self, line: int, name: str):
        self.name = name
        super().__init__(line, f"unknown primitive {name!r}")


class ArityMismatch(ParseError):
    def __init__(self, line: int, name: str, expected: str, got: int):
        self.name = name
        self.expected = expected
        self.got = got
        super().__init__(line, f"{name} expects {expected} argument(s), got {got}")


class ArgOutOfRange(ParseError):
    """Argument outside its parameter domain (numeric range or allowed tokens)."""

    def __init__(self, line: int, name: str, index: int, value, domain: str):
        self.name = name
        self.index = index
        self.value = value
        self.domain = domain
        super().__init__(line, f"{name} argument {index + 1} = {value!r} not in {domain}")


# --- parsed forms -------------------------------------------------------------

Literal = Union[float, bool, str]


@dataclass(frozen=True)
class ActionCall:
    name: str
    args: tuple = ()
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.name}({', '.join(_render_arg(a) for a in self.args)})"


@dataclass(frozen=True)
class ActionScript:
    calls: tuple[ActionCall, ...]
    robot: Optional[str] = None

    def __len__(self) -> int:
        return len(self.calls)


@dataclass(frozen=True)
class MultiRobotPlan:
    scripts: dict  # robot id (or None for the addressed robot) -> ActionScript

    def __post_init__(self):
        object.__setattr__(self, "scripts", dict(self.scripts))

    def robots(self) -> list:
        return list(self.scripts)

    def total_calls(self) -> int:
        return sum(len(s) for s in self.scripts.values())


_CALL_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)$")
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d+)?|\.\d+)$")
_ROBOT_HEADER_RE = re.compile(r"^@robot\s+(\S+)$")


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def _parse_args(raw: str, lineno: int) -> list[Literal]:
    raw = raw.strip()
    if not raw:
        return []
    args: list[Literal] = []
    for piece in raw.split(","):
        token = piece.strip()
        if not token:
            raise ScriptSyntaxError(lineno, "empty argument")
        if _NUMBER_RE.match(token):
            args.append(float(token))
        elif token in ("true", "false"):
            args.append(token == "true")
        elif token in KEYWORD_TOKENS:
            args.append(token)
        else:
            raise ScriptSyntaxError(lineno, f"bad argument token {token!r}")
    return args


def _validate_call(name: str, args: list[Literal], lineno: int) -> ActionCall:
    sig = lookup(name)
    if sig is None:
        raise UnknownPrimitive(lineno, name)
    if not (sig.min_arity <= len(args) <= sig.max_arity):
        expected = (
            str(sig.min_arity)
            if sig.min_arity == sig.max_arity
            else f"{sig.min_arity}..{sig.max_arity}"
        )
        raise ArityMismatch(lineno, name, expected, len(args))
    for i, (arg, param) in enumerate(zip(args, sig.params)):
        if param.kind is ParamKind.NUMBER:
            if not isinstance(arg, float):
                raise ArgOutOfRange(lineno, name, i, arg, param.domain())
            if param.range is not None:
                lo, hi = param.range
                half_open = name in _HALF_OPEN_MAX
                if arg < lo or arg > hi or (half_open and arg == hi):
                    bound = f"[{lo}, {hi})" if half_open else f"[{lo}, {hi}]"
                    raise ArgOutOfRange(lineno, name, i, arg, bound)
        elif param.kind is ParamKind.BOOLEAN:
            if not isinstance(arg, bool):
                raise ArgOutOfRange(lineno, name, i, arg, param.domain())
        else:  # keyword
            if not isinstance(arg, str):
                raise ArgOutOfRange(lineno, name, i, arg, param.domain())
    return ActionCall(name=name, args=tuple(args), line=lineno)


def _parse_sections(text: str):
    """Yield (robot id or None, calls) sections in source order."""
    sections: list[tuple[Optional[str], list[ActionCall], int]] = []
    current_robot: Optional[str] = None
    current_calls: list[ActionCall] = []
    started = False

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        if line.startswith("@"):
            m = _ROBOT_HEADER_RE.match(line)
            if not m:
                raise ScriptSyntaxError(lineno, f"bad robot header {line!r}")
            if started:
                sections.append((current_robot, current_calls, lineno))
            current_robot = m.group(1)
            current_calls = []
            started = True
            continue
        m = _CALL_RE.match(line)
        if not m:
            raise ScriptSyntaxError(lineno, f"expected name(arg, ...), got {line!r}")
        name, raw_args = m.group(1), m.group(2)
        current_calls.append(_validate_call(name, _parse_args(raw_args, lineno), lineno))
        started = True

    if started:
        sections.append((current_robot, current_calls, -1))
    return sections


def parse_script(text: str) -> ActionScript:
    """Parse a single-robot script. Raises ParseError (fail-fast, line-numbered)."""
    sections = _parse_sections(text)
    if not sections:
        raise ScriptSyntaxError(1, "empty script")
    if len(sections) > 1:
        raise ScriptSyntaxError(
            sections[1][2], "multiple @robot sections; use parse_plan for multi-robot text"
        )
    robot, calls, _ = sections[0]
    if not calls:
        raise ScriptSyntaxError(1, "empty script")
    return ActionScript(calls=tuple(calls), robot=robot)


def parse_plan(text: str, default_robot: Optional[str] = None) -> MultiRobotPlan:
    """Parse possibly multi-robot text into per-robot scripts.

    A headerless script is assigned to default_robot (None = the addressed
    robot, resolved at bind time). Duplicate robot sections are an error.
    """
    sections = _parse_sections(text)
    if not sections:
        raise ScriptSyntaxError(1, "empty script")
    scripts: dict = {}
    for robot, calls, header_line in sections:
        key = robot if robot is not None else default_robot
        if not calls:
            raise ScriptSyntaxError(max(header_line, 1), f"empty section for robot {key!r}")
        if key in scripts:
            raise ScriptSyntaxError(max(header_line, 1), f"robot {key!r} addressed twice")
        scripts[key] = ActionScript(calls=tuple(calls), robot=key)
    return MultiRobotPlan(scripts=scripts)


# --- reply extraction ---------------------------------------------------------

_TAG_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_+. -]*$")


def extract_code_block(reply: str) -> str:
    """Pull the first triple-backtick fenced block out of a chat reply.

    Total function: an unterminated fence runs to the end of the reply, and a
    fence-free reply passes through trimmed.
    """
    parts = reply.split("```")
    if len(parts) < 2:
        return reply.strip()
    body = parts[1]
    first_nl = body.find("\n")
    if first_nl >= 0:
        tag = body[:first_nl].strip()
        if tag == "" or _TAG_RE.match(tag):
            body = body[first_nl + 1 :]
    else:
        # single-line fence contents; a lone language tag means an empty block
        if _TAG_RE.match(body.strip() or "-"):
            body = ""
    return body.strip()


# --- canonical printing -------------------------------------------------------

def _render_number(v: float) -> str:
    text = f"{v:.6g}"
    if "e" in text or "E" in text:
        text = f"{v:.9f}".rstrip("0").rstrip(".")
        if "." not in text:
            text += ".0"
        return text
    if "." not in text:
        text += ".0"
    return text


def _render_arg(arg: Literal) -> str:
    if isinstance(arg, bool):
        return "true" if arg else "false"
    if isinstance(arg, float):
        return _render_number(arg)
    return str(arg)


def pretty_print(script: ActionScript) -> str:
    """Canonical text form; parse_script(pretty_print(s)) == s."""
    lines = []
    if script.robot is not None:
        lines.append(f"@robot {script.robot}")
    lines.extend(str(call) for call in script.calls)
    return "\n".join(lines)


def pretty_print_plan(plan: MultiRobotPlan) -> str:
    chunks = []
    for robot, script in plan.scripts.items():
        if robot is not None and script.robot != robot:
            script = ActionScript(calls=script.calls, robot=robot)
        chunks.append(pretty_print(script))
    return "\n".join(chunks)
