"""Instruction planning: prompt assembly, chat backends, reply parsing.

The prompt pipeline is deterministic; all variability lives behind the
Backend interface so an oracle lookup, a fault injector, and a live
chat-completions endpoint are interchangeable.
"""

from __future__ import annotations

import json
import os
import random
import re
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import requests

from .actions import (
    MultiRobotPlan,
    ParseError,
    extract_code_block,
    parse_plan,
    registry_default,
)
from .world import Scene

ENV_BASE_URL = "LINGUA_LLM_BASE_URL"
ENV_MODEL = "LINGUA_LLM_MODEL"
ENV_KEY_VAR = "LINGUA_LLM_KEY_VAR"

INSTRUCTION_MARKER = "### Instruction"

_SYSTEM_LINE = "You translate operator instructions into robot action scripts."

DEFAULT_PREAMBLE = (
    "You control mobile robots in a planar training arena. Convert the"
    " operator's instruction into a script of action calls drawn only from"
    " the function list below."
)

DEFAULT_OUTPUT_CONTRACT = (
    "Reply with exactly one fenced code block, one call per line; prefix each"
    " robot's section with `@robot <id>` when multiple robots are addressed."
    " No prose outside the block."
)


class BackendUnreachable(Exception):
    """Transport to the backend failed after all retries."""


class EmptyReply(Exception):
    """Backend answered with no usable text."""


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str = DEFAULT_PREAMBLE
    output_contract: str = DEFAULT_OUTPUT_CONTRACT
    few_shot: tuple = ()  # (instruction, script) pairs


DEFAULT_TEMPLATE = PromptTemplate()


@dataclass(frozen=True)
class BackendConfig:
    """Declarative backend selection; build() turns it into a live Backend."""

    kind: str  # http_chat | oracle | fault_injection
    base_url: Optional[str] = None
    model: Optional[str] = None
    key_var: Optional[str] = None
    timeout_s: float = 30.0
    retries: int = 2
    dataset_path: Optional[str] = None
    inner: Optional["BackendConfig"] = None
    fault_rate: Optional[float] = None
    fault_seed: int = 0
    corrupt_ids: tuple = ()

    def __post_init__(self):
        if self.kind not in ("http_chat", "oracle", "fault_injection"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")
        if self.retries < 0:
            raise ValueError("retries must be nonnegative")

    def build(self) -> "Backend":
        if self.kind == "oracle":
            if not self.dataset_path:
                raise ValueError("oracle backend needs dataset_path")
            return OracleBackend.from_jsonl(self.dataset_path)
        if self.kind == "fault_injection":
            if self.inner is None:
                raise ValueError("fault_injection needs an inner backend")
            inner = self.inner.build()
            corrupt_instructions = frozenset()
            if self.corrupt_ids:
                if not self.dataset_path and not self.inner.dataset_path:
                    raise ValueError("corrupt id list needs a dataset to resolve against")
                path = self.dataset_path or self.inner.dataset_path
                by_id = {rec["id"]: rec["instruction"] for rec in _read_jsonl(path)}
                missing = [cid for cid in self.corrupt_ids if cid not in by_id]
                if missing:
                    raise ValueError(f"corrupt ids not in dataset: {missing}")
                corrupt_instructions = frozenset(by_id[cid] for cid in self.corrupt_ids)
            return FaultInjectionBackend(
                inner,
                corrupt_instructions=corrupt_instructions,
                rate=self.fault_rate,
                seed=self.fault_seed,
            )
        return HttpChatBackend(
            base_url=self.base_url or "",
            model=self.model or "",
            key_var=self.key_var,
            timeout_s=self.timeout_s,
            retries=self.retries,
        )


@dataclass
class PlannerExchange:
    """Everything observable about one instruction -> script round trip."""

    prompt: str
    raw_reply: str
    extracted: str
    plan: Optional[MultiRobotPlan]
    parse_error: Optional[ParseError]
    backend_id: str
    latency_s: float

    @property
    def ok(self) -> bool:
        return self.plan is not None


# --- prompt rendering ---------------------------------------------------------


def render_primitive_reference(registry=None) -> str:
    """One line per primitive: signature plus its one-sentence semantics."""
    if registry is None:
        registry = registry_default()
    lines = ["Available functions:"]
    for sig in registry:
        parts = []
        for p in sig.params:
            if p.kind.value == "number":
                desc = f"{p.name}: number"
                if p.range is not None:
                    desc += f" in {p.domain()}"
            elif p.kind.value == "keyword":
                desc = f"{p.name}: keyword"
            else:
                desc = f"{p.name}: boolean"
            if p.optional:
                desc += ", optional"
            parts.append(desc)
        lines.append(f"- {sig.name}({'; '.join(parts)}): {sig.summary}")
    return "\n".join(lines)


def _capability_blurb(cfg) -> str:
    traits = ["drives on world x/y with staged deceleration"]
    if cfg.kind.has_camera:
        traits.append("carries a camera (capturePhoto)")
    if cfg.kind.has_arm:
        traits.append("has a 5-joint arm with gripper and fold/extend presets")
    if cfg.kind.value == "box_bot":
        traits.append("pushes objects caught in its front transport frame")
    pose = cfg.pose
    return (
        f"@robot {cfg.id}: {cfg.kind.value} at ({pose.x:g}, {pose.y:g})"
        f" heading {pose.heading:g} deg; " + "; ".join(traits) + "."
    )


def build_prompt(
    template: PromptTemplate,
    scene: Scene,
    selection: Optional[Sequence[str]],
    instruction: str,
) -> str:
    """Render the full prompt; deterministic for equal inputs."""
    if not instruction or not instruction.strip():
        raise ValueError("instruction must be nonempty")
    robots = scene.robots
    if selection:
        wanted = set(selection)
        robots = tuple(r for r in scene.robots if r.id in wanted)
    sections = [template.preamble, "## Robots"]
    sections.extend(_capability_blurb(cfg) for cfg in robots)
    sections.append("## Functions")
    sections.append(render_primitive_reference())
    sections.append("## Output format")
    sections.append(template.output_contract)
    for shot_instruction, shot_script in template.few_shot:
        sections.append(f"Example instruction: {shot_instruction}")
        sections.append(f"Example reply:\n```\n{shot_script}\n```")
    sections.append(f"{INSTRUCTION_MARKER}\n{instruction}")
    return "\n\n".join(sections)


# --- backends -----------------------------------------------------------------


class Backend:
    """Minimal chat interface: prompt text in, reply text out."""

    id = "backend"

    def complete(self, prompt: str) -> str:
        raise NotImplementedError


def _read_jsonl(path) -> list:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


class OracleBackend(Backend):
    """Replays stored ground-truth scripts keyed by instruction text."""

    id = "oracle"

    def __init__(self, scripts_by_instruction: dict):
        self._scripts = dict(scripts_by_instruction)

    @classmethod
    def from_jsonl(cls, path) -> "OracleBackend":
        return cls({rec["instruction"]: rec["oracle_script"] for rec in _read_jsonl(path)})

    @staticmethod
    def instruction_from_prompt(prompt: str) -> str:
        if INSTRUCTION_MARKER not in prompt:
            raise KeyError("prompt carries no instruction section")
        return prompt.rsplit(INSTRUCTION_MARKER, 1)[1].strip()

    def complete(self, prompt: str) -> str:
        instruction = self.instruction_from_prompt(prompt)
        if instruction not in self._scripts:
            raise EmptyReply(f"oracle has no script for instruction {instruction!r}")
        return f"```\n{self._scripts[instruction]}\n```"


_FIRST_CALL_RE = re.compile(r"^(\s*)([A-Za-z_][A-Za-z0-9_]*)(\()")

CORRUPT_TOKEN = "doBarrelRoll"


def corrupt_reply(reply: str) -> str:
    """Rename the first call in the reply's script to a non-registry token."""
    body = extract_code_block(reply)
    lines = body.splitlines()
    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("@robot"):
            continue
        lines[i] = _FIRST_CALL_RE.sub(rf"\g<1>{CORRUPT_TOKEN}\g<3>", line, count=1)
        break
    return "```\n" + "\n".join(lines) + "\n```"


class FaultInjectionBackend(Backend):
    """Wraps a backend and corrupts selected replies into parse failures.

    Selection is either an explicit instruction set (resolved from case ids)
    or a seeded per-instruction coin flip, so outcomes stay order-independent.
    """

    id = "fault"

    def __init__(
        self,
        inner: Backend,
        corrupt_instructions: frozenset = frozenset(),
        rate: Optional[float] = None,
        seed: int = 0,
    ):
        if rate is not None and not (0.0 <= rate <= 1.0):
            raise ValueError("fault rate must be within [0, 1]")
        self.inner = inner
        self.corrupt_instructions = corrupt_instructions
        self.rate = rate
        self.seed = seed
        self.id = f"fault({inner.id})"

    def _should_corrupt(self, instruction: str) -> bool:
        if instruction in self.corrupt_instructions:
            return True
        if self.rate is not None:
            rng = random.Random(f"{self.seed}:{instruction}")
            return rng.random() < self.rate
        return False

    def complete(self, prompt: str) -> str:
        reply = self.inner.complete(prompt)
        instruction = OracleBackend.instruction_from_prompt(prompt)
        if self._should_corrupt(instruction):
            return corrupt_reply(reply)
        return reply


class HttpChatBackend(Backend):
    """Chat-completions client (Groq, Ollama, and workalikes).

    POST {base_url}/chat/completions with {model, messages, temperature}.
    Reply text is read from choices[0].message.content, falling back to
    choices[0].text for completion-style servers.
    """

    id = "http"

    def __init__(
        self,
        base_url: str,
        model: str,
        key_var: Optional[str] = None,
        timeout_s: float = 30.0,
        retries: int = 2,
        temperature: float = 0.0,
    ):
        if not base_url:
            raise ValueError("http backend needs a base URL")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.key_var = key_var
        self.timeout_s = timeout_s
        self.retries = retries
        self.temperature = temperature
        self.id = f"http:{model}" if model else "http"

    @classmethod
    def from_env(cls, **overrides) -> "HttpChatBackend":
        base_url = overrides.pop("base_url", os.environ.get(ENV_BASE_URL, ""))
        model = overrides.pop("model", os.environ.get(ENV_MODEL, ""))
        key_var = overrides.pop("key_var", os.environ.get(ENV_KEY_VAR) or None)
        return cls(base_url=base_url, model=model, key_var=key_var, **overrides)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.key_var:
            token = os.environ.get(self.key_var, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    @staticmethod
    def _reply_text(payload: dict) -> str:
        try:
            choice = payload["choices"][0]
        except (KeyError, IndexError, TypeError):
            return ""
        message = choice.get("message")
        if isinstance(message, dict) and message.get("content"):
            return message["content"]
        return choice.get("text") or ""

    def complete(self, prompt: str) -> str:
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": _SYSTEM_LINE},
                {"role": "user", "content": prompt},
            ],
            "temperature": self.temperature,
        }
        last_error: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            if attempt:
                # full jitter, capped at 2 s
                time.sleep(random.uniform(0.0, min(2.0, 0.25 * (2 ** attempt))))
            try:
                resp = requests.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers=self._headers(),
                    timeout=self.timeout_s,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = BackendUnreachable(f"server error {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise BackendUnreachable(f"request rejected: {resp.status_code} {resp.text[:200]}")
            try:
                text = self._reply_text(resp.json())
            except ValueError:
                last_error = BackendUnreachable("reply was not JSON")
                continue
            if text.strip():
                return text
            last_error = EmptyReply("backend returned no text")
        if isinstance(last_error, EmptyReply):
            raise last_error
        raise BackendUnreachable(str(last_error))


# --- the planning entry point ---------------------------------------------------


def plan(
    instruction: str,
    scene: Scene,
    selection: Optional[Sequence[str]],
    backend: Backend,
    template: PromptTemplate = DEFAULT_TEMPLATE,
) -> PlannerExchange:
    """One full round trip: prompt -> backend -> extracted script -> parse.

    Transport failures raise; malformed scripts come back inside the exchange
    so callers can count them as planning failures.
    """
    prompt = build_prompt(template, scene, selection, instruction)
    started = time.perf_counter()
    raw = backend.complete(prompt)
    latency = time.perf_counter() - started
    if not raw or not raw.strip():
        raise EmptyReply("backend returned no text")
    extracted = extract_code_block(raw)
    default_robot = selection[0] if selection and len(selection) == 1 else None
    parsed: Optional[MultiRobotPlan] = None
    error: Optional[ParseError] = None
    try:
        parsed = parse_plan(extracted, default_robot=default_robot)
        if None in parsed.scripts:
            raise ParseError(1, "script does not say which robot it addresses")
    except ParseError as exc:
        parsed = None
        error = exc
    return PlannerExchange(
        prompt=prompt,
        raw_reply=raw,
        extracted=extracted,
        plan=parsed,
        parse_error=error,
        backend_id=backend.id,
        latency_s=latency,
    )
