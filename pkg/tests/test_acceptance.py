"""Acceptance criteria, one test per criterion, tolerances pinned inline.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line
per criterion.
"""

import json
import pathlib
import threading
import time
import urllib.error
import urllib.request

import numpy as np
import pytest

from recoursekit.attribution import BackgroundSet, shapley_exact, stacked_segments
from recoursekit.dataset import FeatureSchema, SubjectRecord
from recoursekit.model import (
    LogisticModel,
    penalized_log_loss,
    penalized_log_loss_grad,
)
from recoursekit.recourse import (
    BUDGET,
    STUCK,
    TARGET_REACHED,
    ConstraintSet,
    RecoursePath,
    undo,
)
from recoursekit.service import RecourseService, make_server

from conftest import make_dataset
from helpers import LinearScorer, candidate_ranking_oracle

FIXTURES = pathlib.Path(__file__).resolve().parent / "fixtures"

# paths produced while fuzzing; the stacked-segment criterion audits them all
_TESTED_PATHS: list[RecoursePath] = []


def _report(line: str) -> None:
    print(f"[PASS] {line}")


def test_shapley_efficiency_full_table(fixture_dataset, fixture_model, fixture_background):
    """max |score - (base + sum phi)| <= 1e-9 over all 200 subjects; <= 60 s."""
    assert len(fixture_dataset) == 200
    assert len(fixture_dataset.feature_names) == 11
    assert len(fixture_background.records) == 32

    start = time.perf_counter()
    worst = 0.0
    for record in fixture_dataset.records:
        av = shapley_exact(
            fixture_model, record, fixture_background, fixture_dataset.feature_names
        )
        score = fixture_model.score(record.values)
        worst = max(worst, abs(score - (av.base + sum(av.phi.values()))))
    elapsed = time.perf_counter() - start

    assert worst <= 1e-9, f"efficiency violated by {worst:.3e}"
    assert elapsed <= 60.0, f"table took {elapsed:.1f}s"
    _report(
        f"shapley efficiency: max gap {worst:.2e} over 200 subjects in {elapsed:.1f}s"
    )


def test_linear_closed_form_oracle(fixture_dataset, fixture_background):
    """enumeration phi == w_f * (n_f(x) - mean_B n_f) to 1e-12, 50 subjects."""
    rng = np.random.default_rng(42)
    weights = {n: float(rng.normal(0, 0.5)) for n in fixture_dataset.feature_names}
    scorer = LinearScorer(weights, bias=0.3, schema=fixture_dataset.schema)
    bg_norm = np.array(
        [
            [(r.values[f.name] - f.min) / f.span for f in fixture_dataset.schema]
            for r in fixture_background.records
        ]
    )
    bg_mean = bg_norm.mean(axis=0)
    worst = 0.0
    for idx in rng.choice(len(fixture_dataset), size=50, replace=False):
        record = fixture_dataset.records[idx]
        av = shapley_exact(
            scorer, record, fixture_background, fixture_dataset.feature_names
        )
        for j, f in enumerate(fixture_dataset.schema):
            n_x = (record.values[f.name] - f.min) / f.span
            expected = weights[f.name] * (n_x - bg_mean[j])
            worst = max(worst, abs(av.phi[f.name] - expected))
    assert worst <= 1e-12, f"closed form off by {worst:.3e}"
    _report(f"linear closed-form oracle: max gap {worst:.2e} over 50 subjects")


def test_axiom_suite(fixture_dataset, fixture_background):
    """dummy exact zero; symmetry <= 1e-12; linearity <= 1e-12."""
    names = fixture_dataset.feature_names
    # dummy: a zero-weight feature gets exactly zero
    weights = {n: 1.0 for n in names}
    weights["age"] = 0.0
    model = LogisticModel(weights=weights, bias=-0.5, schema=fixture_dataset.schema)
    av = shapley_exact(model, fixture_dataset.records[7], fixture_background, names)
    assert av.phi["age"] == 0.0

    # symmetry: interchangeable features with equal subject values
    schema = [
        FeatureSchema(name="a", min=0.0, max=1.0, mean=0.5),
        FeatureSchema(name="b", min=0.0, max=1.0, mean=0.5),
        FeatureSchema(name="c", min=0.0, max=1.0, mean=0.5),
    ]
    twin_model = LogisticModel(
        weights={"a": 0.9, "b": 0.9, "c": -0.4}, bias=0.1, schema=schema
    )
    background = BackgroundSet(
        records=tuple(
            SubjectRecord(id=f"b{i}", values={"a": v, "b": v, "c": w})
            for i, (v, w) in enumerate([(0.2, 0.9), (0.5, 0.1), (0.8, 0.4)])
        ),
        source="full",
    )
    subject = SubjectRecord(id="s", values={"a": 0.65, "b": 0.65, "c": 0.3})
    av = shapley_exact(twin_model, subject, background, ["a", "b", "c"])
    sym_gap = abs(av.phi["a"] - av.phi["b"])
    assert sym_gap <= 1e-12

    # linearity across two linear scorers
    rng = np.random.default_rng(7)
    w1 = {n: float(rng.normal()) for n in names}
    w2 = {n: float(rng.normal()) for n in names}
    f = LinearScorer(w1, bias=0.1, schema=fixture_dataset.schema)
    g = LinearScorer(w2, bias=-0.2, schema=fixture_dataset.schema)
    a, b = 0.45, -1.2

    class Combined:
        def score(self, values):
            return a * f.score(values) + b * g.score(values)

        def score_rows(self, fn, raw):
            return a * f.score_rows(fn, raw) + b * g.score_rows(fn, raw)

    subject = fixture_dataset.records[11]
    av_f = shapley_exact(f, subject, fixture_background, names)
    av_g = shapley_exact(g, subject, fixture_background, names)
    av_c = shapley_exact(Combined(), subject, fixture_background, names)
    lin_gap = max(
        abs(av_c.phi[n] - (a * av_f.phi[n] + b * av_g.phi[n])) for n in names
    )
    assert lin_gap <= 1e-12
    _report(
        f"axiom suite: dummy exact, symmetry gap {sym_gap:.2e}, linearity gap {lin_gap:.2e}"
    )


def test_projection_ranking_matches_brute_force(fixture_engine, fixture_model):
    """ranked candidates equal the brute-force script for 20 random states."""
    ds = fixture_engine.dataset
    constraints = ConstraintSet()
    rng = np.random.default_rng(20)
    for idx in rng.choice(len(ds), size=20, replace=False):
        sid = ds.ids[int(idx)]
        path = fixture_engine.start_path(sid)
        engine_ranked = [
            c.subject_id
            for c in fixture_engine.find_candidates(path.last, constraints, path)
        ]
        oracle_ranked = [
            row[0]
            for row in candidate_ranking_oracle(
                ds,
                fixture_model,
                ds.record(sid),
                float(fixture_engine.outcomes[int(idx)]),
                constraints,
                {sid},
            )
        ]
        assert engine_ranked == oracle_ranked, f"ranking mismatch from {sid}"
    _report("projection ranking: 20/20 states match brute force exactly")


def test_path_monotonicity_and_undo_fuzz(fixture_engine):
    """1,000 fuzzed select/undo sequences against a reference stack model."""
    rng = np.random.default_rng(1000)
    constraints = ConstraintSet()
    checked_selects = 0
    for _ in range(1000):
        start = fixture_engine.dataset.ids[int(rng.integers(200))]
        path = fixture_engine.start_path(start)
        snapshots = [path]
        reference_stack = [start]
        for _ in range(int(rng.integers(2, 7))):
            if rng.uniform() < 0.65:
                candidates = fixture_engine.find_candidates(
                    path.last, constraints, path
                )
                if not candidates:
                    continue
                pick = candidates[int(rng.integers(min(4, len(candidates))))]
                before = path.last.outcome
                path = fixture_engine.extend_path(path, pick.subject_id, constraints)
                assert path.last.outcome > before  # strict increase on accept
                checked_selects += 1
                snapshots.append(path)
                reference_stack.append(pick.subject_id)
            elif len(path) > 1:
                path = undo(path)
                snapshots.pop()
                reference_stack.pop()
                assert path == snapshots[-1]  # structural equality restored
        assert list(path.subject_ids) == reference_stack
        _TESTED_PATHS.append(path)
    assert checked_selects > 1000
    _report(
        f"path monotonicity + undo: 1000 sequences, {checked_selects} accepted selects"
    )


def test_stacked_segment_identity(fixture_engine):
    """stack top == outcome (1e-9); downward heights == sum |negative phi|."""
    paths = list(_TESTED_PATHS)
    if not paths:  # standalone invocation
        path = fixture_engine.start_path("c003")
        for _ in range(3):
            cands = fixture_engine.find_candidates(path.last, ConstraintSet(), path)
            path = fixture_engine.extend_path(path, cands[0].subject_id)
        paths = [path]
    states = 0
    for path in paths:
        for state in path.states:
            segments = stacked_segments(state.attribution)
            assert segments[-1].y_to == pytest.approx(state.outcome, abs=1e-9)
            downward = sum(
                s.y_from - s.y_to for s in segments if s.sign == "negative"
            )
            entries = list(state.attribution.phi.values())
            entries.append(state.attribution.others)
            expected = sum(abs(p) for p in entries if p < 0)
            assert downward == pytest.approx(expected, abs=1e-12)
            states += 1
    _report(f"stacked-segment identity: {states} states audited")


def test_greedy_scenario_bottom_decile(fixture_engine):
    """bottom-decile starts: valid termination, >= 1 target_reached, <= 10 s."""
    order = np.argsort(fixture_engine.outcomes)
    bottom = [fixture_engine.dataset.ids[int(i)] for i in order[:20]]
    start = time.perf_counter()
    reasons = []
    reached = 0
    for sid in bottom:
        path, reason = fixture_engine.greedy_plan(sid, target_outcome=0.8)
        assert reason in (TARGET_REACHED, STUCK, BUDGET)
        outcomes = [s.outcome for s in path.states]
        assert all(b > a for a, b in zip(outcomes, outcomes[1:]))
        if reason == TARGET_REACHED:
            reached += 1
            assert path.last.outcome >= 0.8
        reasons.append(reason)
        _TESTED_PATHS.append(path)
    elapsed = time.perf_counter() - start
    assert reached >= 1
    assert elapsed <= 10.0, f"greedy batch took {elapsed:.1f}s"
    _report(
        f"greedy scenario: {reached}/20 reached 0.8, all terminations valid, {elapsed:.2f}s"
    )


def test_gradient_finite_difference_check():
    """analytic gradient vs central differences (h=1e-6), rel err <= 1e-5."""
    ds = make_dataset(n_features=5, n_records=60, seed=3)
    X = ds.norm
    y = np.array([r.label for r in ds.records], dtype=float)
    rng = np.random.default_rng(42)
    h = 1e-6
    l2 = 1e-3
    worst = 0.0
    for _ in range(10):
        w = rng.normal(0, 1.5, size=X.shape[1])
        b = float(rng.normal())
        grad_w, grad_b = penalized_log_loss_grad(X, y, w, b, l2)
        numeric = np.empty_like(w)
        for j in range(len(w)):
            bump = np.zeros_like(w)
            bump[j] = h
            numeric[j] = (
                penalized_log_loss(X, y, w + bump, b, l2)
                - penalized_log_loss(X, y, w - bump, b, l2)
            ) / (2 * h)
        numeric_b = (
            penalized_log_loss(X, y, w, b + h, l2)
            - penalized_log_loss(X, y, w, b - h, l2)
        ) / (2 * h)
        rel = np.max(
            np.abs(grad_w - numeric) / np.maximum(1.0, np.abs(numeric))
        )
        rel_b = abs(grad_b - numeric_b) / max(1.0, abs(numeric_b))
        worst = max(worst, rel, rel_b)
    assert worst <= 1e-5
    _report(f"gradient check: worst relative error {worst:.2e} at 10 points")


def test_api_contract_replay(fixture_engine):
    """recorded exchanges replay byte-identically on a fresh server."""
    with open(FIXTURES / "api_contract.json", encoding="utf-8") as fh:
        entries = json.load(fh)
    endpoints = {e["path"].split("?")[0].rsplit("/", 1)[-1] for e in entries}
    assert {"schema", "subjects", "session", "select", "undo", "path", "candidates"} <= {
        "schema", "subjects", "session", *endpoints,
    }

    service = RecourseService(fixture_engine)  # fresh sessions, counter at zero
    server = make_server(service, port=0)
    base = f"http://127.0.0.1:{server.server_address[1]}"
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        for entry in entries:
            data = entry["body"].encode() if entry["body"] is not None else None
            req = urllib.request.Request(
                base + entry["path"],
                data=data,
                method=entry["method"],
                headers={"Content-Type": "application/json"} if data else {},
            )
            try:
                with urllib.request.urlopen(req) as resp:
                    status, body = resp.status, resp.read()
            except urllib.error.HTTPError as err:
                status, body = err.code, err.read()
            assert status == entry["status"], entry["name"]
            assert body == entry["response"].encode(), (
                f"{entry['name']}: response bytes diverged"
            )
    finally:
        server.shutdown()
    _report(f"api contract: {len(entries)} recorded exchanges replayed byte-identically")
