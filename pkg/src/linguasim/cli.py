"""Command-line entry points: one-shot runs, the benchmark, and the server."""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .bench import emit_report, load_dataset, run_suite
from .engine import Engine, ExecStatus, trajectory_hash
from .planner import (
    BackendConfig,
    BackendUnreachable,
    EmptyReply,
    HttpChatBackend,
    plan,
)
from .world import load_scene_file


def default_scene_path() -> str:
    return str(resources.files("linguasim").joinpath("data/scenes/threebot.json"))


def default_dataset_path() -> str:
    return str(resources.files("linguasim").joinpath("data/datasets/bench108.jsonl"))


def parse_backend_spec(spec: str, dataset_path: str):
    """Build a backend from a CLI spec: oracle | http | fault:<ids|rate=r,seed=s>."""
    if spec == "oracle":
        return BackendConfig(kind="oracle", dataset_path=dataset_path).build()
    if spec == "http":
        return HttpChatBackend.from_env()
    if spec.startswith("fault:"):
        detail = spec[len("fault:"):]
        inner = BackendConfig(kind="oracle", dataset_path=dataset_path)
        if "rate=" in detail:
            rate = 0.0
            seed = 0
            for part in detail.split(","):
                key, _, value = part.partition("=")
                if key == "rate":
                    rate = float(value)
                elif key == "seed":
                    seed = int(value)
                else:
                    raise SystemExit(f"unknown fault option {key!r}")
            cfg = BackendConfig(
                kind="fault_injection", inner=inner, dataset_path=dataset_path,
                fault_rate=rate, fault_seed=seed,
            )
        else:
            ids = tuple(x for x in detail.split(",") if x)
            if not ids:
                raise SystemExit("fault backend needs case ids or rate=...")
            cfg = BackendConfig(
                kind="fault_injection", inner=inner, dataset_path=dataset_path,
                corrupt_ids=ids,
            )
        return cfg.build()
    raise SystemExit(f"unknown backend spec {spec!r} (use oracle, http, or fault:...)")


def cmd_run(args) -> int:
    scene = load_scene_file(args.scene)
    backend = parse_backend_spec(args.backend, args.dataset)
    robots = args.robots.split(",") if args.robots else None
    try:
        exchange = plan(args.text, scene, robots, backend)
    except (BackendUnreachable, EmptyReply) as exc:
        print(f"backend error: {exc}")
        return 1
    print(f"backend: {exchange.backend_id}  latency: {exchange.latency_s:.3f}s")
    print("script:")
    for line in exchange.extracted.splitlines():
        print(f"  {line}")
    if exchange.parse_error is not None:
        print(f"parse error: {exchange.parse_error}")
        return 1
    engine = Engine(scene)
    try:
        world, outcomes = engine.run_to_completion(exchange.plan)
    except Exception as exc:
        print(f"bind rejected: {exc}")
        return 1
    ok = True
    for rid in sorted(outcomes):
        out = outcomes[rid]
        line = f"{rid}: {out.status.value} ({out.calls_completed} calls, {out.ticks_used} ticks)"
        if out.fault is not None:
            line += f" fault at call {out.fault[0] + 1}: {out.fault[1]}"
        print(line)
        ok = ok and out.status is ExecStatus.COMPLETED
    print(f"ticks: {world.tick}  trajectory: {trajectory_hash(world)[:16]}")
    return 0 if ok else 2


def cmd_bench(args) -> int:
    scene = load_scene_file(args.scene)
    cases = load_dataset(args.dataset)
    backend = parse_backend_spec(args.backend, args.dataset)
    tier = None
    if args.filter:
        key, _, value = args.filter.partition("=")
        if key != "tier" or value not in ("simple", "composite", "complex"):
            raise SystemExit("--filter takes tier=simple|composite|complex")
        tier = value
    report = run_suite(
        cases, scene, backend,
        parallelism=args.parallel, repeat=args.repeat, tier=tier,
    )
    print(emit_report(report, "table"))
    if args.report:
        fmt = "json" if args.report.endswith(".json") else "csv"
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(emit_report(report, fmt) + "\n")
        print(f"wrote {fmt} report to {args.report}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .gateway import SimService, create_app, mount_frontend

    scene = load_scene_file(args.scene)
    backends = {"oracle": parse_backend_spec("oracle", args.dataset)}
    try:
        backends["http"] = HttpChatBackend.from_env()
    except ValueError:
        pass  # no LINGUA_LLM_BASE_URL configured; oracle only
    default = args.backend if args.backend in backends else "oracle"
    service = SimService(scene, backends, default, realtime=True, speed=args.speed)
    app = create_app(service)
    if mount_frontend(app, args.frontend):
        print(f"serving console UI from {args.frontend}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linguasim",
        description="Natural-language robot control with a deterministic simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="plan one instruction and execute it headless")
    run_p.add_argument("--text", required=True, help="instruction text")
    run_p.add_argument("--robots", default=None, help="comma-separated robot ids")
    run_p.add_argument("--scene", default=default_scene_path())
    run_p.add_argument("--dataset", default=default_dataset_path())
    run_p.add_argument("--backend", default="oracle")
    run_p.set_defaults(func=cmd_run)

    bench_p = sub.add_parser("bench", help="run the benchmark suite")
    bench_p.add_argument("--dataset", default=default_dataset_path())
    bench_p.add_argument("--scene", default=default_scene_path())
    bench_p.add_argument("--backend", default="oracle")
    bench_p.add_argument("--filter", default=None, help="tier=simple|composite|complex")
    bench_p.add_argument("--report", default=None, help="write csv (.csv) or json (.json)")
    bench_p.add_argument("--parallel", type=int, default=1)
    bench_p.add_argument("--repeat", type=int, default=1)
    bench_p.set_defaults(func=cmd_bench)

    serve_p = sub.add_parser("serve", help="host the live world over HTTP/WS")
    serve_p.add_argument("--scene", default=default_scene_path())
    serve_p.add_argument("--dataset", default=default_dataset_path())
    serve_p.add_argument("--backend", default="oracle")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--speed", type=float, default=1.0, help="sim-time multiplier")
    serve_p.add_argument("--frontend", default="frontend/dist", help="console UI dist dir")
    serve_p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
