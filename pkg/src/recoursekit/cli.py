"""Command line pipeline: train, explain, plan, serve.

Exit codes: 0 success, 1 domain error, 2 usage error. All commands are
deterministic for identical flags and inputs.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .attribution import BackgroundSet, EFFICIENCY_TOL, shapley_exact
from .dataset import Dataset
from .errors import RecourseKitError, UnknownFeature
from .model import TrainConfig, load_model, save_model, train_logistic
from .recourse import ConstraintSet, RecourseEngine
from .serialize import fmt17, write_attribution_csv, write_path_csv
from .service import DEFAULT_HOST, DEFAULT_PORT, RecourseService, build_engine, make_server

PORT_ENV_VAR = "REVISE_PORT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recoursekit",
        description="Incremental recourse planning over a tabular scorer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit the logistic scorer on a labeled CSV")
    train.add_argument("--data", required=True, help="subject CSV with labels")
    train.add_argument("--out", required=True, help="model file to write")
    train.add_argument("--learning-rate", type=float, default=0.1)
    train.add_argument("--epochs", type=int, default=2000)
    train.add_argument("--l2-lambda", type=float, default=1e-3)
    train.add_argument("--seed", type=int, default=42)
    train.set_defaults(func=cmd_train)

    explain = sub.add_parser("explain", help="write the exact attribution table")
    explain.add_argument("--data", required=True)
    explain.add_argument("--model", required=True)
    explain.add_argument("--out", required=True, help="attribution CSV to write")
    explain.add_argument("--background-size", type=int, default=32)
    explain.add_argument("--seed", type=int, default=42)
    explain.set_defaults(func=cmd_explain)

    plan = sub.add_parser("plan", help="batch greedy recourse from a start subject")
    plan.add_argument("--data", required=True)
    plan.add_argument("--model", required=True)
    plan.add_argument("--start-id", required=True)
    plan.add_argument("--target", type=float, default=0.8)
    plan.add_argument("--max-steps", type=int, default=10)
    plan.add_argument("--immutable", default="", help="comma-separated feature names")
    plan.add_argument("--max-l1-radius", type=float, default=None)
    plan.add_argument("--out", default=None, help="optional path CSV to write")
    plan.add_argument("--background-size", type=int, default=32)
    plan.add_argument("--seed", type=int, default=42)
    plan.set_defaults(func=cmd_plan)

    serve = sub.add_parser("serve", help="run the HTTP session API")
    serve.add_argument("--data", required=True)
    serve.add_argument("--model", required=True)
    serve.add_argument("--host", default=DEFAULT_HOST)
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--ui-dir", default=None, help="static assets served at /")
    serve.add_argument("--background-size", type=int, default=32)
    serve.add_argument("--seed", type=int, default=42)
    serve.set_defaults(func=cmd_serve)
    return parser


def cmd_train(args) -> int:
    dataset = Dataset.load(args.data)
    config = TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        l2_lambda=args.l2_lambda,
        seed=args.seed,
    )
    model = train_logistic(dataset.records, dataset.schema, config)
    save_model(model, args.out)
    print(f"trained {len(model.feature_order)} features on {len(dataset)} records")
    print(f"final loss: {fmt17(model.loss_history[-1])}")
    return 0


def cmd_explain(args) -> int:
    dataset = Dataset.load(args.data)
    model = load_model(args.model, dataset.schema)
    background = BackgroundSet.from_dataset(
        dataset, size=args.background_size, seed=args.seed
    )
    vectors = []
    for record in dataset.records:
        av = shapley_exact(model, record, background, dataset.feature_names)
        gap = abs(av.total - model.score(record.values))
        if gap > EFFICIENCY_TOL:
            print(
                f"EfficiencyViolation: subject {record.id} off by {gap:.3e}",
                file=sys.stderr,
            )
            return 1
        vectors.append(av)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        write_attribution_csv(vectors, dataset.feature_names, fh)
    print(f"wrote {len(vectors)} attribution rows to {args.out}")
    return 0


def cmd_plan(args) -> int:
    dataset = Dataset.load(args.data)
    model = load_model(args.model, dataset.schema)
    engine = RecourseEngine(
        dataset,
        model,
        background_size=args.background_size,
        background_seed=args.seed,
    )
    immutable = frozenset(n for n in args.immutable.split(",") if n)
    unknown = immutable - set(dataset.feature_names)
    if unknown:
        raise UnknownFeature(sorted(unknown)[0])
    constraints = ConstraintSet(
        immutable_features=immutable, max_l1_radius=args.max_l1_radius
    )
    path, reason = engine.greedy_plan(
        args.start_id,
        constraints=constraints,
        target_outcome=args.target,
        max_steps=args.max_steps,
    )
    start = path.states[0]
    print(f"start: {start.subject_id} outcome={fmt17(start.outcome)}")
    for i, state in enumerate(path.states[1:], start=1):
        print(
            f"step {i}: {state.subject_id}"
            f" projection={fmt17(state.step_projection)}"
            f" l1={fmt17(state.step_l1_change)}"
            f" outcome={fmt17(state.outcome)}"
        )
    print(f"reason: {reason}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_path_csv(path, dataset.schema, fh)
        print(f"wrote path to {args.out}")
    return 0


def cmd_serve(args) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    port = args.port
    if os.environ.get(PORT_ENV_VAR):
        port = int(os.environ[PORT_ENV_VAR])
    log = logging.getLogger("recoursekit.cli")
    log.info("loading data and precomputing attributions...")
    engine = build_engine(
        args.data,
        args.model,
        background_size=args.background_size,
        seed=args.seed,
    )
    log.info("engine ready: %d subjects, displayed %s", len(engine.dataset), engine.displayed)
    service = RecourseService(engine)
    try:
        server = make_server(service, host=args.host, port=port, ui_dir=args.ui_dir)
    except OSError as exc:
        print(f"cannot bind {args.host}:{port}: {exc}", file=sys.stderr)
        return 1
    log.info("listening on http://%s:%d", args.host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RecourseKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
