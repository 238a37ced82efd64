"""Benchmark harness: dataset model, per-case execution, tiered reporting.

Cases are independent worlds, so the suite parallelizes freely and verdicts
never depend on execution order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .actions import ParseError, parse_plan
from .engine import BindError, Engine, ExecStatus, RuntimeLimits
from .planner import Backend, PlannerExchange, plan
from .world import JointVector, Scene, in_region, normalize_heading

TIERS = ("simple", "composite", "complex")
TIER_BANDS = {"simple": (1, 2), "composite": (3, 4), "complex": (5, 6)}

VERDICTS = ("success", "parse_failure", "runtime_fault", "timeout", "goal_unmet")

GOAL_KINDS = ("at_xy", "heading_is", "in_region", "holding", "photos_at_least", "arm_at")


class DatasetError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass(frozen=True)
class GoalPredicate:
    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in GOAL_KINDS:
            raise ValueError(f"unknown goal kind {self.kind!r}")
        tol = self.params.get("tol")
        if tol is not None and tol <= 0:
            raise ValueError(f"goal {self.kind}: tolerance must be positive")

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, raw: dict) -> "GoalPredicate":
        raw = dict(raw)
        kind = raw.pop("kind", None)
        if kind is None:
            raise ValueError("goal record missing 'kind'")
        return cls(kind=kind, params=raw)


def evaluate_goal(goal: GoalPredicate, world, scene: Scene) -> tuple[bool, str]:
    """Check one predicate against a final world; returns (ok, detail)."""
    p = goal.params
    if goal.kind == "at_xy":
        state = world.robots[p["robot"]]
        dist = math.hypot(state.pose.x - p["x"], state.pose.y - p["y"])
        ok = dist <= p.get("tol", 0.05)
        return ok, f"{p['robot']} at ({state.pose.x:.3f}, {state.pose.y:.3f}), {dist:.3f} m from target"
    if goal.kind == "heading_is":
        state = world.robots[p["robot"]]
        err = abs(normalize_heading(state.pose.heading - p["beta"]))
        ok = err <= p.get("tol", 1.0)
        return ok, f"{p['robot']} heading {state.pose.heading:.2f}, off by {err:.2f} deg"
    if goal.kind == "in_region":
        region = scene.region(p["region"])
        target = p["target"]
        if target in world.robots:
            pos = (world.robots[target].pose.x, world.robots[target].pose.y)
        elif target in world.objects:
            pos = world.objects[target].position
        else:
            return False, f"no robot or object named {target!r}"
        ok = in_region(pos, region)
        return ok, f"{target} at ({pos[0]:.3f}, {pos[1]:.3f}), region {p['region']}"
    if goal.kind == "holding":
        state = world.robots[p["robot"]]
        ok = state.attached_object == p["object"]
        return ok, f"{p['robot']} holding {state.attached_object!r}"
    if goal.kind == "photos_at_least":
        state = world.robots[p["robot"]]
        ok = state.photo_count >= p["n"]
        return ok, f"{p['robot']} took {state.photo_count} photo(s), wanted >= {p['n']}"
    # arm_at: preset name or explicit 5-joint target
    state = world.robots[p["robot"]]
    if "preset" in p:
        target = scene.robot(p["robot"]).preset(p["preset"])
        label = p["preset"]
    else:
        target = JointVector(tuple(p["joints"]))
        label = "joints"
    tol = p.get("tol", 1.0)
    worst = max(abs(c - t) for c, t in zip(state.joints, target))
    ok = worst <= tol
    return ok, f"{p['robot']} arm vs {label}: max joint error {worst:.2f} deg"


@dataclass(frozen=True)
class BenchCase:
    id: str
    tier: str
    instruction: str
    robots: tuple
    oracle_script: str
    goals: tuple
    timeout_ticks: int

    def __post_init__(self):
        if self.tier not in TIER_BANDS:
            raise ValueError(f"case {self.id}: unknown tier {self.tier!r}")
        if self.timeout_ticks <= 0:
            raise ValueError(f"case {self.id}: timeout_ticks must be positive")


def _case_from_record(raw: dict, line: int) -> BenchCase:
    for key in ("id", "tier", "instruction", "robots", "oracle_script", "goals", "timeout_ticks"):
        if key not in raw:
            raise DatasetError(line, f"record missing field {key!r}")
    try:
        case = BenchCase(
            id=raw["id"],
            tier=raw["tier"],
            instruction=raw["instruction"],
            robots=tuple(raw["robots"]),
            oracle_script=raw["oracle_script"],
            goals=tuple(GoalPredicate.from_dict(g) for g in raw["goals"]),
            timeout_ticks=int(raw["timeout_ticks"]),
        )
    except (ValueError, TypeError) as exc:
        raise DatasetError(line, str(exc)) from None
    default = case.robots[0] if len(case.robots) == 1 else None
    try:
        parsed = parse_plan(case.oracle_script, default_robot=default)
    except ParseError as exc:
        raise DatasetError(line, f"case {case.id}: oracle script invalid: {exc}") from None
    lo, hi = TIER_BANDS[case.tier]
    count = parsed.total_calls()
    if not (lo <= count <= hi):
        raise DatasetError(
            line,
            f"case {case.id}: {count} calls outside the {case.tier} band {lo}-{hi}",
        )
    return case


def load_dataset(path) -> list[BenchCase]:
    """Read and validate a line-delimited JSON dataset."""
    cases: list[BenchCase] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(line_no, f"not valid JSON: {exc}") from None
            case = _case_from_record(raw, line_no)
            if case.id in seen:
                raise DatasetError(line_no, f"duplicate case id {case.id!r}")
            seen.add(case.id)
            cases.append(case)
    if not cases:
        raise DatasetError(0, "no cases")
    return cases


@dataclass
class CaseResult:
    case_id: str
    tier: str
    verdict: str
    ticks_used: int
    latency_s: float
    details: str = ""
    rep: int = 0


@dataclass
class TierStats:
    n: int
    successes: int
    histogram: dict
    rep_rates: list = field(default_factory=list)  # percent per repeat pass

    @property
    def rate_percent(self) -> Optional[float]:
        if self.n == 0:
            return None
        return round(100.0 * self.successes / self.n, 1)

    def rate_text(self) -> str:
        rate = self.rate_percent
        return "n/a" if rate is None else f"{rate:.1f}%"


@dataclass
class BenchReport:
    rows: list
    tiers: dict
    overall: TierStats
    config: dict


def run_case(
    case: BenchCase,
    scene: Scene,
    backend: Backend,
    rep: int = 0,
    exchange: Optional[PlannerExchange] = None,
) -> CaseResult:
    """Plan, execute, and classify a single case. Never throws for case-level failures."""
    if exchange is None:
        exchange = plan(case.instruction, scene, case.robots, backend)
    if exchange.parse_error is not None:
        return CaseResult(
            case_id=case.id,
            tier=case.tier,
            verdict="parse_failure",
            ticks_used=0,
            latency_s=exchange.latency_s,
            details=str(exchange.parse_error),
            rep=rep,
        )
    limits = RuntimeLimits(max_ticks_per_script=case.timeout_ticks)
    engine = Engine(scene, limits=limits)
    try:
        world, outcomes = engine.run_to_completion(exchange.plan, limits)
    except BindError as exc:
        # the script was well-formed text but invalid against the scene;
        # counts with the planning failures, not the runtime ones
        return CaseResult(
            case_id=case.id,
            tier=case.tier,
            verdict="parse_failure",
            ticks_used=0,
            latency_s=exchange.latency_s,
            details=f"bind rejected: {exc}",
            rep=rep,
        )

    verdict = "success"
    details = ""
    faults = [o for o in outcomes.values() if o.status is ExecStatus.FAULT]
    timeouts = [o for o in outcomes.values() if o.status is ExecStatus.TIMEOUT]
    if faults:
        verdict = "runtime_fault"
        details = "; ".join(f"{o.robot}: {o.fault[1]}" for o in faults)
    elif timeouts:
        verdict = "timeout"
        details = "; ".join(f"{o.robot}: script budget exhausted" for o in timeouts)
    else:
        misses = []
        for goal in case.goals:
            ok, detail = evaluate_goal(goal, world, scene)
            if not ok:
                misses.append(f"{goal.kind}: {detail}")
        if misses:
            verdict = "goal_unmet"
            details = "; ".join(misses)
    return CaseResult(
        case_id=case.id,
        tier=case.tier,
        verdict=verdict,
        ticks_used=world.tick,
        latency_s=exchange.latency_s,
        details=details,
        rep=rep,
    )


def _stats_for(rows: Sequence[CaseResult], reps: int) -> TierStats:
    histogram = {v: 0 for v in VERDICTS}
    for row in rows:
        histogram[row.verdict] += 1
    successes = histogram["success"]
    rep_rates = []
    for rep in range(reps):
        rep_rows = [r for r in rows if r.rep == rep]
        if rep_rows:
            wins = sum(1 for r in rep_rows if r.verdict == "success")
            rep_rates.append(round(100.0 * wins / len(rep_rows), 1))
    return TierStats(
        n=len(rows),
        successes=successes,
        histogram={k: v for k, v in histogram.items() if v},
        rep_rates=rep_rates,
    )


def run_suite(
    cases: Sequence[BenchCase],
    scene: Scene,
    backend: Backend,
    parallelism: int = 1,
    repeat: int = 1,
    tier: Optional[str] = None,
) -> BenchReport:
    """Run every (filtered) case `repeat` times and aggregate per tier."""
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    selected = [c for c in cases if tier is None or c.tier == tier]
    jobs = [(case, rep) for rep in range(repeat) for case in selected]
    if parallelism > 1 and jobs:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(lambda j: run_case(j[0], scene, backend, rep=j[1]), jobs))
    else:
        rows = [run_case(case, scene, backend, rep=rep) for case, rep in jobs]

    tiers = {
        t: _stats_for([r for r in rows if r.tier == t], repeat) for t in TIERS
    }
    overall = _stats_for(rows, repeat)
    config = {
        "backend": backend.id,
        "scene": scene.name,
        "cases": len(selected),
        "repeat": repeat,
        "parallelism": parallelism,
        "tier_filter": tier,
    }
    return BenchReport(rows=rows, tiers=tiers, overall=overall, config=config)


# --- report rendering -----------------------------------------------------------


def _tier_line(name: str, stats: TierStats) -> str:
    if stats.n == 0:
        return f"{name:<10} 0/0    n/a"
    line = f"{name:<10} {stats.successes}/{stats.n}  {stats.rate_text()}"
    if len(stats.rep_rates) > 1:
        lo, hi = min(stats.rep_rates), max(stats.rep_rates)
        mean = sum(stats.rep_rates) / len(stats.rep_rates)
        line += f"  (mean {mean:.1f}%, range {lo:.1f}-{hi:.1f}%)"
    return line


def emit_report(report: BenchReport, fmt: str = "table") -> str:
    if fmt == "table":
        lines = [
            "backend={backend} scene={scene} cases={cases} repeat={repeat}".format(**report.config)
        ]
        for t in TIERS:
            lines.append(_tier_line(t, report.tiers[t]))
        lines.append(_tier_line("overall", report.overall))
        failures = {k: v for k, v in report.overall.histogram.items() if k != "success"}
        if failures:
            lines.append("failures: " + ", ".join(f"{k}={v}" for k, v in sorted(failures.items())))
        return "\n".join(lines)
    if fmt == "csv":
        lines = ["case_id,tier,verdict,ticks,latency_s"]
        for row in report.rows:
            lines.append(
                f"{row.case_id},{row.tier},{row.verdict},{row.ticks_used},{row.latency_s:.6f}"
            )
        for t in TIERS:
            stats = report.tiers[t]
            rate = stats.rate_text().rstrip("%")
            lines.append(f"tier:{t},{t},success_rate,{stats.successes}/{stats.n},{rate}")
        return "\n".join(lines)
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2)
    raise ValueError(f"unknown report format {fmt!r}")


def report_to_dict(report: BenchReport) -> dict:
    def stats_dict(s: TierStats) -> dict:
        return {
            "n": s.n,
            "successes": s.successes,
            "histogram": s.histogram,
            "rep_rates": list(s.rep_rates),
        }

    return {
        "config": report.config,
        "tiers": {t: stats_dict(report.tiers[t]) for t in TIERS},
        "overall": stats_dict(report.overall),
        "rows": [
            {
                "case_id": r.case_id,
                "tier": r.tier,
                "verdict": r.verdict,
                "ticks_used": r.ticks_used,
                "latency_s": r.latency_s,
                "details": r.details,
                "rep": r.rep,
            }
            for r in report.rows
        ],
    }


def report_from_dict(raw: dict) -> BenchReport:
    def stats(s: dict) -> TierStats:
        return TierStats(
            n=s["n"],
            successes=s["successes"],
            histogram=dict(s["histogram"]),
            rep_rates=list(s["rep_rates"]),
        )

    return BenchReport(
        rows=[CaseResult(**row) for row in raw["rows"]],
        tiers={t: stats(raw["tiers"][t]) for t in raw["tiers"]},
        overall=stats(raw["overall"]),
        config=dict(raw["config"]),
    )
