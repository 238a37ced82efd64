"""Dataset validation, goal predicates, verdict classification, reporting."""

import json

import pytest

from linguasim.bench import (
    BenchCase,
    DatasetError,
    GoalPredicate,
    TierStats,
    emit_report,
    evaluate_goal,
    load_dataset,
    report_from_dict,
    report_to_dict,
    run_case,
    run_suite,
)
from linguasim.engine import Engine
from linguasim.planner import EmptyReply, OracleBackend

from conftest import DATASET_PATH


@pytest.fixture(scope="module")
def dataset():
    return load_dataset(DATASET_PATH)


@pytest.fixture(scope="module")
def oracle():
    return OracleBackend.from_jsonl(DATASET_PATH)


def record(**overrides):
    base = {
        "id": "t-01",
        "tier": "simple",
        "instruction": "step forward",
        "robots": ["bot1"],
        "oracle_script": "moveForward(0.5)",
        "goals": [{"kind": "at_xy", "robot": "bot1", "x": 0.5, "y": 1.5, "tol": 0.05}],
        "timeout_ticks": 2000,
    }
    base.update(overrides)
    return base


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    return path


class _EchoBackend:
    """Replies with one fixed script regardless of the prompt."""

    def __init__(self, script):
        self.script = script
        self.id = "echo"

    def complete(self, prompt):
        return f"```\n{self.script}\n```"


# -- dataset loading -------------------------------------------------------------


class TestLoadDataset:
    def test_packaged_dataset_shape(self, dataset):
        assert len(dataset) == 108
        by_tier = {}
        for case in dataset:
            by_tier.setdefault(case.tier, []).append(case)
        assert {t: len(v) for t, v in by_tier.items()} == {
            "simple": 36,
            "composite": 36,
            "complex": 36,
        }
        assert len({c.id for c in dataset}) == 108

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(record()) + "\n\n\n")
        assert len(load_dataset(path)) == 1

    def test_malformed_json_names_the_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(record()) + "\n{nope\n")
        with pytest.raises(DatasetError) as exc:
            load_dataset(path)
        assert exc.value.line == 2
        assert "not valid JSON" in exc.value.reason

    def test_duplicate_id_rejected(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [record(), record()])
        with pytest.raises(DatasetError, match="duplicate case id"):
            load_dataset(path)

    def test_missing_field_rejected(self, tmp_path):
        rec = record()
        del rec["goals"]
        path = write_jsonl(tmp_path / "d.jsonl", [rec])
        with pytest.raises(DatasetError, match="goals"):
            load_dataset(path)

    def test_tier_band_enforced(self, tmp_path):
        rec = record(oracle_script="moveForward(1)\nmoveToY(2)\nrotateToBeta(0)")
        path = write_jsonl(tmp_path / "d.jsonl", [rec])
        with pytest.raises(DatasetError, match="outside the simple band"):
            load_dataset(path)

    def test_unparseable_oracle_script_rejected(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [record(oracle_script="fly(1)")])
        with pytest.raises(DatasetError, match="oracle script invalid"):
            load_dataset(path)

    def test_unknown_tier_rejected(self, tmp_path):
        path = write_jsonl(tmp_path / "d.jsonl", [record(tier="heroic")])
        with pytest.raises(DatasetError, match="heroic"):
            load_dataset(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text("")
        with pytest.raises(DatasetError, match="no cases"):
            load_dataset(path)


# -- goal predicates ----------------------------------------------------------------


class TestGoalPredicates:
    def test_round_trip(self):
        goal = GoalPredicate.from_dict({"kind": "holding", "robot": "bot3", "object": "cube"})
        assert goal.to_dict() == {"kind": "holding", "robot": "bot3", "object": "cube"}
        assert GoalPredicate.from_dict(goal.to_dict()) == goal

    def test_validation(self):
        with pytest.raises(ValueError, match="unknown goal kind"):
            GoalPredicate(kind="wins_race", params={})
        with pytest.raises(ValueError, match="missing 'kind'"):
            GoalPredicate.from_dict({"robot": "bot1"})
        with pytest.raises(ValueError, match="tolerance"):
            GoalPredicate(kind="at_xy", params={"robot": "r", "x": 0, "y": 0, "tol": 0})

    def test_at_xy(self, scene):
        world = Engine(scene).world
        goal = GoalPredicate("at_xy", {"robot": "bot1", "x": 0.5, "y": 2.0, "tol": 0.05})
        ok, detail = evaluate_goal(goal, world, scene)
        assert ok and "bot1" in detail
        far = GoalPredicate("at_xy", {"robot": "bot1", "x": 5.0, "y": 2.0})
        assert evaluate_goal(far, world, scene) == (False, detail.replace("0.000 m", "4.500 m"))

    def test_heading_wraps(self, scene):
        from linguasim.world import Pose2D

        world = Engine(scene).world
        world.robots["bot1"].pose = Pose2D(0.0, 0.0, -179.8)
        goal = GoalPredicate("heading_is", {"robot": "bot1", "beta": 180.0, "tol": 0.5})
        ok, _ = evaluate_goal(goal, world, scene)
        assert ok

    def test_in_region_for_robots_objects_and_strangers(self, scene):
        from linguasim.world import Pose2D

        world = Engine(scene).world
        world.robots["bot1"].pose = Pose2D(2.8, 0.5, 0.0)
        assert evaluate_goal(
            GoalPredicate("in_region", {"target": "bot1", "region": "parking_box"}),
            world,
            scene,
        )[0]
        ok, detail = evaluate_goal(
            GoalPredicate("in_region", {"target": "obstacle_box", "region": "parking_box"}),
            world,
            scene,
        )
        assert not ok
        ok, detail = evaluate_goal(
            GoalPredicate("in_region", {"target": "nobody", "region": "parking_box"}),
            world,
            scene,
        )
        assert not ok and "nobody" in detail

    def test_holding_and_photos(self, scene):
        world = Engine(scene).world
        world.robots["bot3"].attached_object = "target_cube"
        world.robots["bot1"].photo_count = 3
        assert evaluate_goal(
            GoalPredicate("holding", {"robot": "bot3", "object": "target_cube"}), world, scene
        )[0]
        assert not evaluate_goal(
            GoalPredicate("holding", {"robot": "bot3", "object": "pillar"}), world, scene
        )[0]
        assert evaluate_goal(
            GoalPredicate("photos_at_least", {"robot": "bot1", "n": 3}), world, scene
        )[0]
        assert not evaluate_goal(
            GoalPredicate("photos_at_least", {"robot": "bot1", "n": 4}), world, scene
        )[0]

    def test_arm_at_preset_and_joints(self, scene):
        from linguasim.world import JointVector

        world = Engine(scene).world
        world.robots["bot3"].joints = JointVector((0.0, 90.0, 0.0, 0.0, 0.0))
        assert evaluate_goal(
            GoalPredicate("arm_at", {"robot": "bot3", "preset": "extend"}), world, scene
        )[0]
        assert not evaluate_goal(
            GoalPredicate("arm_at", {"robot": "bot3", "preset": "fold"}), world, scene
        )[0]
        assert evaluate_goal(
            GoalPredicate(
                "arm_at", {"robot": "bot3", "joints": [0.2, 89.8, 0.0, 0.0, 0.0], "tol": 0.5}
            ),
            world,
            scene,
        )[0]


# -- single-case execution ---------------------------------------------------------


def case_of(script, goals, timeout_ticks=6000, robots=("bot1",), tier="simple"):
    return BenchCase(
        id="crafted",
        tier=tier,
        instruction="crafted instruction",
        robots=tuple(robots),
        oracle_script=script,
        goals=tuple(GoalPredicate.from_dict(g) for g in goals),
        timeout_ticks=timeout_ticks,
    )


class TestRunCase:
    def test_success(self, scene):
        case = case_of(
            "moveForward(0.5)",
            [{"kind": "at_xy", "robot": "bot1", "x": 0.5, "y": 1.5, "tol": 0.05}],
        )
        result = run_case(case, scene, _EchoBackend(case.oracle_script))
        assert result.verdict == "success"
        assert result.ticks_used > 0
        assert result.latency_s >= 0.0

    def test_parse_failure(self, scene):
        case = case_of("moveForward(0.5)", [])
        result = run_case(case, scene, _EchoBackend("doBarrelRoll(0.5)"))
        assert result.verdict == "parse_failure"
        assert result.ticks_used == 0
        assert "doBarrelRoll" in result.details

    def test_bind_rejection_counts_as_parse_failure(self, scene):
        # well-formed text, but bot2 has no camera
        case = case_of("capturePhoto()", [], robots=("bot2",))
        result = run_case(case, scene, _EchoBackend("capturePhoto()"))
        assert result.verdict == "parse_failure"
        assert "bind rejected" in result.details

    def test_runtime_fault(self, scene):
        # 300 m of travel blows the per-call tick budget long before arrival
        case = case_of(
            "moveToX(300)",
            [{"kind": "at_xy", "robot": "bot1", "x": 300.0, "y": 2.0}],
            timeout_ticks=5000,
        )
        result = run_case(case, scene, _EchoBackend(case.oracle_script))
        assert result.verdict == "runtime_fault"
        assert "call timeout" in result.details

    def test_timeout(self, scene):
        case = case_of(
            "moveToX(300)",
            [{"kind": "at_xy", "robot": "bot1", "x": 300.0, "y": 2.0}],
            timeout_ticks=60,
        )
        result = run_case(case, scene, _EchoBackend(case.oracle_script))
        assert result.verdict == "timeout"
        assert result.ticks_used == 60

    def test_fault_outranks_timeout(self, scene):
        # bot1 faults its call budget while bot3 is still driving when the
        # script budget lands; the fault wins the verdict
        script = "@robot bot1\nmoveToX(300)\n@robot bot3\nmoveToY(-300)"
        case = case_of(
            script, [], robots=("bot1", "bot3"), tier="composite", timeout_ticks=4500
        )
        result = run_case(case, scene, _EchoBackend(script))
        assert result.verdict == "runtime_fault"

    def test_goal_unmet_lists_every_miss(self, scene):
        case = case_of(
            "moveForward(0.2)",
            [
                {"kind": "at_xy", "robot": "bot1", "x": 0.5, "y": 0.0, "tol": 0.05},
                {"kind": "photos_at_least", "robot": "bot1", "n": 1},
            ],
        )
        result = run_case(case, scene, _EchoBackend(case.oracle_script))
        assert result.verdict == "goal_unmet"
        assert "at_xy" in result.details
        assert "photos_at_least" in result.details

    def test_backend_failures_propagate(self, scene, oracle):
        case = case_of("moveForward(0.5)", [])
        with pytest.raises(EmptyReply):
            run_case(case, scene, oracle)  # oracle has no such instruction


# -- suite aggregation ---------------------------------------------------------------


class TestRunSuite:
    def test_oracle_sweeps_the_dataset(self, dataset, scene, oracle):
        report = run_suite(dataset, scene, oracle)
        assert report.overall.n == 108
        assert report.overall.successes == 108
        assert report.overall.rate_text() == "100.0%"
        for tier in ("simple", "composite", "complex"):
            stats = report.tiers[tier]
            assert (stats.n, stats.successes) == (36, 36)
            assert stats.rate_text() == "100.0%"
        assert report.overall.histogram == {"success": 108}

    def test_tier_filter(self, dataset, scene, oracle):
        report = run_suite(dataset, scene, oracle, tier="simple")
        assert report.overall.n == 36
        assert report.tiers["composite"].n == 0
        assert report.tiers["composite"].rate_text() == "n/a"
        assert report.config["tier_filter"] == "simple"

    def test_parallel_matches_serial(self, dataset, scene, oracle):
        subset = [c for c in dataset if c.tier == "simple"][:12]
        serial = run_suite(subset, scene, oracle, parallelism=1)
        parallel = run_suite(subset, scene, oracle, parallelism=4)
        key = lambda rows: sorted((r.case_id, r.verdict, r.ticks_used) for r in rows)
        assert key(serial.rows) == key(parallel.rows)

    def test_repeat_tracks_per_pass_rates(self, dataset, scene, oracle):
        subset = [c for c in dataset if c.tier == "simple"][:6]
        report = run_suite(subset, scene, oracle, repeat=2)
        assert len(report.rows) == 12
        assert report.overall.rep_rates == [100.0, 100.0]
        assert {r.rep for r in report.rows} == {0, 1}

    def test_argument_validation(self, dataset, scene, oracle):
        with pytest.raises(ValueError):
            run_suite(dataset, scene, oracle, repeat=0)
        with pytest.raises(ValueError):
            run_suite(dataset, scene, oracle, parallelism=0)


# -- rate arithmetic and rendering ------------------------------------------------------


class TestReporting:
    def test_rates_round_to_one_decimal(self):
        assert TierStats(36, 36, {}).rate_text() == "100.0%"
        assert TierStats(36, 34, {}).rate_text() == "94.4%"
        assert TierStats(36, 32, {}).rate_text() == "88.9%"
        assert TierStats(0, 0, {}).rate_text() == "n/a"
        assert TierStats(108, 102, {}).rate_percent == 94.4

    def test_table_output(self, dataset, scene, oracle):
        report = run_suite(dataset, scene, oracle)
        table = emit_report(report, fmt="table")
        assert "backend=oracle" in table
        assert "simple     36/36  100.0%" in table
        assert "overall    108/108  100.0%" in table
        assert "failures:" not in table

    def test_table_shows_failure_counts(self, dataset, scene, oracle):
        from linguasim.planner import FaultInjectionBackend

        corrupt = {c.instruction for c in dataset if c.id in ("comp-01", "comp-02")}
        backend = FaultInjectionBackend(oracle, corrupt_instructions=frozenset(corrupt))
        report = run_suite(dataset, scene, backend, tier="composite")
        table = emit_report(report, fmt="table")
        assert "composite  34/36  94.4%" in table
        assert "failures: parse_failure=2" in table

    def test_csv_output(self, dataset, scene, oracle):
        report = run_suite(dataset, scene, oracle)
        lines = emit_report(report, fmt="csv").splitlines()
        assert lines[0] == "case_id,tier,verdict,ticks,latency_s"
        assert len(lines) == 1 + 108 + 3  # header, one per case, one per tier
        assert lines[1].startswith("simp-01,simple,success,")
        assert "tier:simple,simple,success_rate,36/36,100.0" in lines

    def test_json_round_trip(self, dataset, scene, oracle):
        report = run_suite(dataset, scene, oracle, tier="simple")
        rebuilt = report_from_dict(json.loads(emit_report(report, fmt="json")))
        assert rebuilt == report

    def test_report_dict_keys(self, dataset, scene, oracle):
        report = run_suite(dataset[:3], scene, oracle)
        raw = report_to_dict(report)
        assert set(raw) == {"config", "tiers", "overall", "rows"}
        assert set(raw["tiers"]) == {"simple", "composite", "complex"}

    def test_unknown_format_rejected(self, dataset, scene, oracle):
        report = run_suite(dataset[:1], scene, oracle)
        with pytest.raises(ValueError):
            emit_report(report, fmt="xml")
