"""HTTP session service: the JSON API that the web UI and tests consume.

Endpoints (all JSON):
  GET    /api/problems
  POST   /api/sessions                {problem_id|dpi, heuristic, mode, k, sigma, sampler, seed}
  GET    /api/sessions/{id}
  POST   /api/sessions/{id}/answer    {value: true|false|"skip", token}
  DELETE /api/sessions/{id}

A snapshot is shaped like one transcript record (the pending step) plus
`stopped` and `final_diagnoses`; repeated GETs with no intervening answer
return byte-identical bodies.  Each session serializes its mutations with
its own lock; answers must echo the current query token (409 otherwise).
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dpi import dpi_from_json
from .errors import FaultscopeError, NoDiscriminatingQueryError, SchemaError
from .registry import ProblemRegistry
from .sequential import (
    Answer,
    Query,
    SessionConfig,
    SessionState,
    apply_answer,
    generate_query_candidates,
    new_session,
    select_query,
    step_record,
)


class CreateSession(BaseModel):
    problem_id: str | None = None
    dpi: dict | None = None
    heuristic: str = "ENT"
    mode: str = "dynamic"
    k: int = 9
    sigma: float = 0.95
    sampler: str = "best_first"
    seed: int = 0


class PostAnswer(BaseModel):
    value: bool | str
    token: str | None = None


@dataclass
class _Session:
    id: str
    state: SessionState
    query: Query | None
    created: float
    updated: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    snapshot: dict = field(default_factory=dict)


def _pick_query(state: SessionState) -> Query | None:
    if state.stop is not None:
        return None
    try:
        return select_query(state, generate_query_candidates(state))
    except (NoDiscriminatingQueryError, ValueError):
        return None


def _build_snapshot(sess: _Session) -> dict:
    state = sess.state
    q = sess.query
    last = state.history[-1] if state.history else None
    stopped = state.stop is not None or (q is None)
    snap = {
        "session_id": sess.id,
        "mode": state.config.mode,
        "heuristic": state.config.heuristic,
        "step": len(state.history),
        "query": None
        if q is None
        else {
            "prop": q.prop,
            "wire": q.wire,
            "token": q.token,
            "partition_sizes": q.partition_sizes(),
            "scores": {k: q.scores.get(k) for k in sorted(q.scores)},
            "p_yes": q.p_yes,
        },
        "partition_sizes": q.partition_sizes() if q else None,
        "scores": {k: q.scores.get(k) for k in sorted(q.scores)} if q else None,
        "answer": None,
        "eliminated": [list(c) for c in last.eliminated] if last else [],
        "remaining": [list(d.comps) for d in state.leading],
        "posteriors": [d.prob for d in state.leading],
        "stopped": stopped,
        "stop_reason": state.stop,
        "final_diagnoses": [list(d.comps) for d in state.leading] if stopped else None,
        "history": [step_record(h) for h in state.history],
    }
    return snap


def create_app(persist_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="faultscope session service")
    registry = ProblemRegistry()
    sessions: dict[str, _Session] = {}
    store_lock = threading.Lock()

    def _persist(sess: _Session, event: dict):
        if not persist_dir:
            return
        os.makedirs(persist_dir, exist_ok=True)
        with open(os.path.join(persist_dir, f"{sess.id}.jsonl"), "a") as f:
            f.write(json.dumps(event, sort_keys=True) + "\n")

    def _replay_logs():
        """Rebuild sessions from append-only logs; selection is deterministic,
        so replaying the recorded answers reproduces the exact state."""
        if not persist_dir or not os.path.isdir(persist_dir):
            return
        for name in sorted(os.listdir(persist_dir)):
            if not name.endswith(".jsonl"):
                continue
            sid = name[:-6]
            try:
                with open(os.path.join(persist_dir, name)) as f:
                    events = [json.loads(line) for line in f if line.strip()]
                if not events or events[0].get("event") != "created":
                    continue
                head = events[0]
                cfg_doc = head["config"]
                if head.get("problem_id"):
                    dpi = registry.get(head["problem_id"]).dpi
                elif cfg_doc.get("dpi"):
                    dpi = dpi_from_json(cfg_doc["dpi"])
                else:
                    continue
                config = SessionConfig(
                    mode=cfg_doc["mode"],
                    heuristic=cfg_doc["heuristic"],
                    k=cfg_doc["k"],
                    sigma=cfg_doc["sigma"],
                    sampler=cfg_doc["sampler"],
                    seed=cfg_doc["seed"],
                )
                state = new_session(dpi, config)
                query = _pick_query(state)
                for ev in events[1:]:
                    if ev.get("event") != "answer" or query is None:
                        continue
                    state = apply_answer(state, query, Answer(ev["value"], source="human"))
                    query = _pick_query(state)
                sess = _Session(
                    id=sid, state=state, query=query,
                    created=head.get("ts", time.time()), updated=time.time(),
                )
                sess.snapshot = _build_snapshot(sess)
                sessions[sid] = sess
            except (KeyError, ValueError, FaultscopeError):
                continue  # unreadable log: skip rather than fail startup

    _replay_logs()

    @app.get("/api/problems")
    def list_problems():
        out = []
        for pid in registry.ids():
            problem = registry.get(pid)
            out.append({"id": pid, "components": list(problem.dpi.comps)})
        return out

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSession):
        if (body.problem_id is None) == (body.dpi is None):
            raise HTTPException(422, "provide exactly one of problem_id or dpi")
        try:
            if body.problem_id is not None:
                dpi = registry.get(body.problem_id).dpi
            else:
                dpi = dpi_from_json(body.dpi)
            config = SessionConfig(
                mode=body.mode,
                heuristic=body.heuristic,
                k=body.k,
                sigma=body.sigma,
                sampler=body.sampler,
                seed=body.seed,
            )
        except (FaultscopeError, SchemaError, ValueError) as e:
            raise HTTPException(422, str(e))
        state = new_session(dpi, config)
        sid = uuid.uuid4().hex[:12]
        now = time.time()
        sess = _Session(id=sid, state=state, query=_pick_query(state), created=now, updated=now)
        sess.snapshot = _build_snapshot(sess)
        with store_lock:
            sessions[sid] = sess
        _persist(sess, {"event": "created", "problem_id": body.problem_id,
                        "config": body.model_dump(), "ts": now})
        return {"session_id": sid, "state": sess.snapshot}

    def _get(sid: str) -> _Session:
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, f"unknown session {sid!r}")
        return sess

    @app.get("/api/sessions/{sid}")
    def get_session(sid: str):
        return _get(sid).snapshot

    @app.post("/api/sessions/{sid}/answer")
    def post_answer(sid: str, body: PostAnswer):
        sess = _get(sid)
        with sess.lock:
            if sess.query is None:
                raise HTTPException(409, "session is stopped; no query to answer")
            if body.token is not None and body.token != sess.query.token:
                return JSONResponse(
                    status_code=409,
                    content={"detail": "stale query token", "state": sess.snapshot},
                )
            if isinstance(body.value, bool):
                value = "true" if body.value else "false"
            elif body.value in ("true", "false", "skip"):
                value = body.value
            else:
                raise HTTPException(422, f"bad answer value {body.value!r}")
            sess.state = apply_answer(sess.state, sess.query, Answer(value, source="human"))
            sess.query = _pick_query(sess.state)
            sess.updated = time.time()
            sess.snapshot = _build_snapshot(sess)
            _persist(sess, {"event": "answer", "value": value, "ts": sess.updated})
            return sess.snapshot

    @app.delete("/api/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        with store_lock:
            if sid not in sessions:
                raise HTTPException(404, f"unknown session {sid!r}")
            del sessions[sid]
        return None

    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
