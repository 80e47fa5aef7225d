"""HTTP session API over the recourse engine.

The pure handler layer (:class:`RecourseService`) maps requests to
(status, document) pairs and owns session state; the thin HTTP layer
serializes documents with 17-significant-digit numbers so responses are
byte-stable for identical engine state and session history.
"""

from __future__ import annotations

import logging
import re
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Mapping
from urllib.parse import parse_qs, urlsplit

import json

from .attribution import stacked_segments
from .dataset import Dataset
from .errors import EmptyPath, NotACandidate, UnknownSubject
from .model import load_model
from .recourse import (
    CandidateTarget,
    ConstraintSet,
    RecourseEngine,
    RecoursePath,
    undo as undo_path,
)
from .serialize import dumps

log = logging.getLogger("recoursekit.service")

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8750
CANDIDATE_CAP = 50


@dataclass
class Session:
    session_id: str
    path: RecoursePath
    constraints: ConstraintSet
    created_at: float
    lock: threading.Lock
    last_used: float = 0.0


def build_engine(
    data_path,
    model_path,
    background_size: int = 32,
    seed: int = 42,
    displayed_count: int = 6,
) -> RecourseEngine:
    """Load data and model, then precompute attributions and display ranks."""
    dataset = Dataset.load(data_path)
    model = load_model(model_path, dataset.schema)
    return RecourseEngine(
        dataset,
        model,
        background_size=background_size,
        background_seed=seed,
        displayed_count=displayed_count,
    )


def parse_constraints(body: Mapping[str, Any], feature_names: list[str]) -> ConstraintSet:
    """Validate a constraints document; raises ValueError on any defect."""
    if not isinstance(body, Mapping):
        raise ValueError("constraints must be an object")
    allowed = {
        "immutable_features",
        "immutable_tolerance",
        "require_improvement",
        "max_l1_radius",
        "exclude_visited",
    }
    unknown = set(body) - allowed
    if unknown:
        raise ValueError(f"unknown constraint fields: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    if "immutable_features" in body:
        names = body["immutable_features"]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise ValueError("immutable_features must be a list of feature names")
        missing = set(names) - set(feature_names)
        if missing:
            raise ValueError(f"unknown features: {sorted(missing)}")
        kwargs["immutable_features"] = frozenset(names)
    if "immutable_tolerance" in body:
        tol = body["immutable_tolerance"]
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
            raise ValueError("immutable_tolerance must be a non-negative number")
        kwargs["immutable_tolerance"] = float(tol)
    if "require_improvement" in body:
        if not isinstance(body["require_improvement"], bool):
            raise ValueError("require_improvement must be a boolean")
        kwargs["require_improvement"] = body["require_improvement"]
    if "max_l1_radius" in body:
        radius = body["max_l1_radius"]
        if radius is not None:
            if not isinstance(radius, (int, float)) or isinstance(radius, bool) or radius <= 0:
                raise ValueError("max_l1_radius must be a positive number or null")
            radius = float(radius)
        kwargs["max_l1_radius"] = radius
    if "exclude_visited" in body:
        if not isinstance(body["exclude_visited"], bool):
            raise ValueError("exclude_visited must be a boolean")
        kwargs["exclude_visited"] = body["exclude_visited"]
    return ConstraintSet(**kwargs)


class RecourseService:
    """Pure request handlers; every method returns (http_status, document).

    ``idle_ttl_seconds`` enables idle eviction; the default (None) keeps
    sessions for the process lifetime.
    """

    def __init__(self, engine: RecourseEngine | None, idle_ttl_seconds: float | None = None):
        self.engine = engine
        self.idle_ttl_seconds = idle_ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        self._counter = 0

    # -- helpers -------------------------------------------------------------

    def _not_ready(self):
        return 503, {"code": "engine_not_ready", "message": "engine is still initializing"}

    def _session(self, session_id: str) -> Session | None:
        with self._registry_lock:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            now = time.time()
            if (
                self.idle_ttl_seconds is not None
                and now - session.last_used > self.idle_ttl_seconds
            ):
                del self._sessions[session_id]
                return None
            session.last_used = now
            return session

    def _candidates_for(self, session: Session) -> list[CandidateTarget]:
        if not session.path.states:
            return []
        return self.engine.find_candidates(
            session.path.last, session.constraints, session.path
        )

    def _candidate_doc(self, c: CandidateTarget) -> dict:
        return {
            "subject_id": c.subject_id,
            "projection": c.projection,
            "l1_change": c.l1_change,
            "outcome_gain": c.outcome_gain,
            "top3": c.top3,
            "deltas": {
                name: {"value": dv, "phi": dphi}
                for name, (dv, dphi) in c.per_feature_delta.items()
            },
        }

    def _candidates_doc(self, candidates: list[CandidateTarget], limit) -> dict:
        shown = candidates if limit is None else candidates[:limit]
        return {
            "candidates": [self._candidate_doc(c) for c in shown],
            "total": len(candidates),
        }

    def _path_doc(self, path: RecoursePath) -> dict:
        states = []
        for state in path.states:
            av = state.attribution
            segments = [
                {"sign": s.sign, "label": s.label, "y_from": s.y_from, "y_to": s.y_to}
                for s in stacked_segments(av)
            ]
            deviations = [
                {
                    "feature": f.name,
                    "range_low": 0.0,
                    "range_high": 1.0,
                    "mean": (f.mean - f.min) / f.span,
                    "current": (state.values[f.name] - f.min) / f.span,
                }
                for f in self.engine.schema
            ]
            step = None
            if state.step_projection is not None:
                step = {
                    "projection": state.step_projection,
                    "l1_change": state.step_l1_change,
                    "outcome_gain": state.step_outcome_gain,
                }
            states.append(
                {
                    "subject_id": state.subject_id,
                    "outcome": state.outcome,
                    "values": {k: state.values[k] for k in self.engine.dataset.feature_names},
                    "base": av.base,
                    "phi": dict(av.phi),
                    "others": av.others,
                    "step": step,
                    "segments": segments,
                    "deviations": deviations,
                }
            )
        return {"target_outcome": path.target_outcome, "states": states}

    # -- endpoints -----------------------------------------------------------

    def get_schema(self):
        if self.engine is None:
            return self._not_ready()
        features = [
            {
                "name": f.name,
                "min": f.min,
                "max": f.max,
                "mean": f.mean,
                "mutable": f.mutable,
                "display_rank": f.display_rank,
            }
            for f in self.engine.schema
        ]
        return 200, {"features": features, "displayed": list(self.engine.displayed)}

    def get_subjects(self):
        if self.engine is None:
            return self._not_ready()
        subjects = []
        for record in self.engine.dataset.records:
            av = self.engine.grouped_attribution(record.id)
            idx = self.engine.dataset.index_of[record.id]
            subjects.append(
                {
                    "id": record.id,
                    "values": {k: record.values[k] for k in self.engine.dataset.feature_names},
                    "outcome": float(self.engine.outcomes[idx]),
                    "base": av.base,
                    "phi": dict(av.phi),
                    "others": av.others,
                }
            )
        return 200, {"subjects": subjects}

    def create_session(self, body: Mapping[str, Any] | None):
        if self.engine is None:
            return self._not_ready()
        try:
            constraints = parse_constraints(body or {}, self.engine.dataset.feature_names)
        except ValueError as exc:
            return 400, {"code": "invalid_constraints", "message": str(exc)}
        with self._registry_lock:
            self._counter += 1
            session_id = f"s{self._counter:06d}"
            now = time.time()
            self._sessions[session_id] = Session(
                session_id=session_id,
                path=RecoursePath(),
                constraints=constraints,
                created_at=now,
                lock=threading.Lock(),
                last_used=now,
            )
        return 200, {"session_id": session_id}

    def select(self, session_id: str, body: Mapping[str, Any] | None, limit=CANDIDATE_CAP):
        if self.engine is None:
            return self._not_ready()
        session = self._session(session_id)
        if session is None:
            return 404, {"code": "unknown_session", "message": f"no session {session_id!r}"}
        if not isinstance(body, Mapping) or not isinstance(body.get("subject_id"), str):
            return 400, {"code": "malformed_body", "message": "body must carry subject_id"}
        subject_id = body["subject_id"]
        with session.lock:
            try:
                if not session.path.states:
                    session.path = self.engine.start_path(subject_id)
                else:
                    session.path = self.engine.extend_path(
                        session.path, subject_id, session.constraints
                    )
            except UnknownSubject as exc:
                return 404, {"code": "unknown_subject", "message": str(exc)}
            except NotACandidate as exc:
                return 409, {"code": "not_a_candidate", "message": str(exc)}
            candidates = self._candidates_for(session)
            return 200, {
                "path": self._path_doc(session.path),
                **self._candidates_doc(candidates, limit),
            }

    def undo(self, session_id: str, limit=CANDIDATE_CAP):
        if self.engine is None:
            return self._not_ready()
        session = self._session(session_id)
        if session is None:
            return 404, {"code": "unknown_session", "message": f"no session {session_id!r}"}
        with session.lock:
            try:
                session.path = undo_path(session.path)
            except EmptyPath as exc:
                return 409, {"code": "empty_path", "message": str(exc)}
            candidates = self._candidates_for(session)
            return 200, {
                "path": self._path_doc(session.path),
                **self._candidates_doc(candidates, limit),
            }

    def get_path(self, session_id: str):
        if self.engine is None:
            return self._not_ready()
        session = self._session(session_id)
        if session is None:
            return 404, {"code": "unknown_session", "message": f"no session {session_id!r}"}
        with session.lock:
            return 200, self._path_doc(session.path)

    def get_candidates(self, session_id: str, limit=CANDIDATE_CAP):
        if self.engine is None:
            return self._not_ready()
        session = self._session(session_id)
        if session is None:
            return 404, {"code": "unknown_session", "message": f"no session {session_id!r}"}
        with session.lock:
            candidates = self._candidates_for(session)
            return 200, self._candidates_doc(candidates, limit)


# -- HTTP layer ---------------------------------------------------------------

_SESSION_ROUTE = re.compile(r"^/api/session/([^/]+)/(select|undo|path|candidates)$")

_MIME_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


def _parse_limit(query: str):
    """?limit=all lifts the cap; ?limit=N caps at N; default CANDIDATE_CAP."""
    params = parse_qs(query)
    raw = params.get("limit", [None])[0]
    if raw is None:
        return CANDIDATE_CAP, None
    if raw == "all":
        return None, None
    try:
        n = int(raw)
        if n < 0:
            raise ValueError
    except ValueError:
        return CANDIDATE_CAP, (400, {"code": "invalid_limit", "message": f"bad limit {raw!r}"})
    return n, None


class ApiRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "recoursekit"

    # set by make_server
    service: RecourseService = None
    ui_dir: Path | None = None

    def log_message(self, fmt, *args):
        log.info("%s %s", self.address_string(), fmt % args)

    def _respond(self, status: int, doc) -> None:
        body = dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            return None

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        url = urlsplit(self.path)
        route = url.path
        if route == "/api/schema":
            return self._respond(*self.service.get_schema())
        if route == "/api/subjects":
            return self._respond(*self.service.get_subjects())
        match = _SESSION_ROUTE.match(route)
        if match:
            session_id, action = match.groups()
            if action == "path":
                return self._respond(*self.service.get_path(session_id))
            if action == "candidates":
                limit, err = _parse_limit(url.query)
                if err:
                    return self._respond(*err)
                return self._respond(*self.service.get_candidates(session_id, limit))
        if route.startswith("/api/"):
            return self._respond(404, {"code": "not_found", "message": f"no route {route}"})
        return self._serve_static(route)

    def do_POST(self):
        url = urlsplit(self.path)
        route = url.path
        if route == "/api/session":
            body = self._read_body()
            if body is None:
                return self._respond(400, {"code": "malformed_body", "message": "invalid JSON"})
            return self._respond(*self.service.create_session(body))
        match = _SESSION_ROUTE.match(route)
        if match:
            session_id, action = match.groups()
            limit, err = _parse_limit(url.query)
            if err:
                return self._respond(*err)
            if action == "select":
                body = self._read_body()
                if body is None:
                    return self._respond(400, {"code": "malformed_body", "message": "invalid JSON"})
                return self._respond(*self.service.select(session_id, body, limit))
            if action == "undo":
                return self._respond(*self.service.undo(session_id, limit))
        return self._respond(404, {"code": "not_found", "message": f"no route {route}"})

    def _serve_static(self, route: str) -> None:
        if self.ui_dir is None:
            return self._respond(404, {"code": "not_found", "message": "no UI directory configured"})
        rel = route.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            return self._respond(404, {"code": "not_found", "message": f"no asset {route}"})
        data = target.read_bytes()
        self.send_response(200)
        self.send_header(
            "Content-Type", _MIME_TYPES.get(target.suffix, "application/octet-stream")
        )
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server(
    service: RecourseService,
    host: str = DEFAULT_HOST,
    port: int = DEFAULT_PORT,
    ui_dir=None,
) -> ThreadingHTTPServer:
    """Bind a threading HTTP server; raises OSError if the port is taken."""
    handler = type(
        "BoundApiRequestHandler",
        (ApiRequestHandler,),
        {"service": service, "ui_dir": Path(ui_dir) if ui_dir else None},
    )
    return ThreadingHTTPServer((host, port), handler)
