"""Read-only HTTP service over a snapshot store.

Every snapshot-scoped response carries provenance (snapshot id and config
digest) around its payload. The only mutable state is the in-memory
Bot-Match session table; sessions are single-writer, expire after an idle
TTL, and never touch the snapshots themselves. Sections that a snapshot
marked absent are served as explicit ``{"absent": true}`` payloads rather
than errors, so consumers can render "not computed" states.
"""
from __future__ import annotations

import csv
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import network, topics
from .snapshot import Snapshot, SnapshotStore

__all__ = ["create_app", "serve"]

SESSION_TTL_SECONDS = 3600.0
EGO_NODE_CAP = 500


def _not_found(message: str, **extra) -> HTTPException:
    return HTTPException(404, detail={"code": "not_found", "message": message, **extra})


def _bad_request(message: str, **extra) -> HTTPException:
    return HTTPException(400, detail={"code": "bad_request", "message": message, **extra})


@dataclass
class _SessionSlot:
    snapshot_id: str
    session: topics.ExpansionSession
    last_used: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class _Runtime:
    """Per-app caches: parsed graphs, DTMs, and live Bot-Match sessions."""

    def __init__(self, store: SnapshotStore, session_ttl: float):
        self.store = store
        self.session_ttl = session_ttl
        self.sessions: dict[str, _SessionSlot] = {}
        self.graph_cache: dict[tuple[str, str], network.ConversationGraph] = {}
        self.names_cache: dict[tuple[str, str], dict[str, str]] = {}
        self.dtm_cache: dict[str, topics.DocTermMatrix] = {}
        self.lock = threading.Lock()

    def snapshot(self, snapshot_id: str) -> Snapshot:
        try:
            return self.store.load(snapshot_id)
        except KeyError:
            raise _not_found(f"unknown snapshot {snapshot_id!r}") from None

    def graph(self, snap: Snapshot, kind: str) -> network.ConversationGraph:
        key = (snap.snapshot_id, kind)
        with self.lock:
            if key not in self.graph_cache:
                path = snap.section_file(f"network/{kind}/edges.csv")
                if not path.exists():
                    raise _not_found(f"no {kind} graph in this snapshot")
                self.graph_cache[key] = network.read_edge_csv(path, kind=kind)
            return self.graph_cache[key]

    def node_names(self, snap: Snapshot, kind: str) -> dict[str, str]:
        key = (snap.snapshot_id, kind)
        with self.lock:
            if key not in self.names_cache:
                names = {}
                path = snap.section_file(f"network/{kind}/nodes.csv")
                if path.exists():
                    with open(path, newline="", encoding="utf-8") as fh:
                        for row in csv.reader(fh):
                            if row and row[0] != "account_id":
                                names[row[0]] = row[1] if len(row) > 1 else ""
                self.names_cache[key] = names
            return self.names_cache[key]

    def dtm(self, snap: Snapshot) -> topics.DocTermMatrix:
        with self.lock:
            if snap.snapshot_id not in self.dtm_cache:
                meta = snap.section_file("dtm/meta.json")
                if not meta.exists():
                    raise _not_found("this snapshot has no document-term matrix")
                self.dtm_cache[snap.snapshot_id] = topics.read_dtm(
                    snap.section_file("dtm")
                )
            return self.dtm_cache[snap.snapshot_id]

    def sweep_sessions(self) -> None:
        now = time.monotonic()
        with self.lock:
            dead = [
                sid
                for sid, slot in self.sessions.items()
                if now - slot.last_used > self.session_ttl
            ]
            for sid in dead:
                del self.sessions[sid]

    def session_slot(self, session_id: str) -> _SessionSlot:
        self.sweep_sessions()
        with self.lock:
            slot = self.sessions.get(session_id)
        if slot is None:
            raise _not_found(f"unknown or expired session {session_id!r}")
        return slot


def _envelope(snap: Snapshot, data) -> dict:
    return {
        "snapshot_id": snap.snapshot_id,
        "config_digest": snap.config_digest,
        "data": data,
    }


def _absent(snap: Snapshot, section: str) -> dict | None:
    entry = snap.manifest["sections"].get(section)
    if entry is None:
        return {"absent": True, "reason": f"section {section!r} not part of this snapshot"}
    if entry.get("status") != "built":
        return {"absent": True, "reason": entry.get("reason", "not computed")}
    return None


def _section_json(snap: Snapshot, relpath: str):
    return json.loads(snap.section_file(relpath).read_text(encoding="utf-8"))


def _session_view(session_id: str, slot: _SessionSlot) -> dict:
    s = slot.session
    return {
        "session_id": session_id,
        "snapshot_id": slot.snapshot_id,
        "seeds": sorted(s.seed_accounts),
        "accepted": sorted(s.accepted),
        "rejected": sorted(s.rejected),
        "frontier": [
            {"account_id": a, "similarity": sim} for a, sim in s.frontier
        ],
        "round": s.round,
    }


class SessionCreate(BaseModel):
    seeds: list[str]


class SessionStep(BaseModel):
    top_n: int = 20


class SessionIds(BaseModel):
    ids: list[str]


def create_app(
    store: SnapshotStore | str | Path, session_ttl: float = SESSION_TTL_SECONDS
) -> FastAPI:
    if not isinstance(store, SnapshotStore):
        store = SnapshotStore(store)
    runtime = _Runtime(store, session_ttl)
    app = FastAPI(title="stream analysis snapshots", docs_url=None, redoc_url=None)
    app.state.runtime = runtime

    @app.exception_handler(HTTPException)
    async def _http_error(_request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content={"error": detail})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        fields = [
            {
                "field": ".".join(str(part) for part in err.get("loc", ())),
                "message": err.get("msg", "invalid"),
            }
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400,
            content={
                "error": {
                    "code": "bad_request",
                    "message": "request validation failed",
                    "fields": fields,
                }
            },
        )

    @app.get("/api/snapshots")
    def list_snapshots():
        return {"snapshots": runtime.store.list()}

    @app.get("/api/snapshots/{snapshot_id}")
    def snapshot_overview(snapshot_id: str):
        snap = runtime.snapshot(snapshot_id)
        return _envelope(
            snap,
            {"sections": snap.manifest["sections"], "config": snap.config},
        )

    @app.get("/api/snapshots/{snapshot_id}/stats")
    def snapshot_stats(snapshot_id: str):
        snap = runtime.snapshot(snapshot_id)
        return _envelope(snap, _section_json(snap, "stats/stats.json"))

    @app.get("/api/snapshots/{snapshot_id}/timeline")
    def timeline(snapshot_id: str, metric: str = "tweets"):
        snap = runtime.snapshot(snapshot_id)
        if metric == "tweets":
            series = []
            with open(snap.section_file("stats/daily.csv"), newline="", encoding="utf-8") as fh:
                for row in csv.reader(fh):
                    if row and row[0] != "date":
                        series.append({"day": row[0], "value": int(row[1])})
            return _envelope(snap, {"metric": metric, "series": series})
        if metric == "abusive":
            absent = _absent(snap, "characterize")
            if absent is None and not snap.section_file("characterize/abusive.json").exists():
                absent = {"absent": True, "reason": "no abusive lexicon configured"}
            if absent:
                return _envelope(snap, {"metric": metric, **absent})
            payload = _section_json(snap, "characterize/abusive.json")
            series = [{"day": day, "value": count} for day, count in payload["daily"]]
            return _envelope(snap, {"metric": metric, "series": series})
        if metric == "creation":
            absent = _absent(snap, "content")
            if absent:
                return _envelope(snap, {"metric": metric, **absent})
            series = []
            with open(snap.section_file("content/creation.csv"), newline="", encoding="utf-8") as fh:
                for row in csv.reader(fh):
                    if row and row[0] != "day":
                        series.append(
                            {
                                "day": row[0],
                                "value": int(row[1]),
                                "bot_proportion": float(row[2]) if row[2] else None,
                            }
                        )
            return _envelope(snap, {"metric": metric, "series": series})
        raise _bad_request(
            f"unknown metric {metric!r}", field="metric",
            allowed=["tweets", "abusive", "creation"],
        )

    @app.get("/api/snapshots/{snapshot_id}/network/ego")
    def ego(
        snapshot_id: str,
        account: str,
        hops: int = 1,
        kind: str = "mention",
        cap: int = EGO_NODE_CAP,
    ):
        snap = runtime.snapshot(snapshot_id)
        if kind not in network.GRAPH_KINDS:
            raise _bad_request(f"unknown graph kind {kind!r}", field="kind")
        if hops < 0:
            raise _bad_request("hops must be >= 0", field="hops")
        if cap < 1:
            raise _bad_request("cap must be >= 1", field="cap")
        g = runtime.graph(snap, kind)
        if account not in g.nodes:
            raise _not_found(f"account {account!r} is not in the {kind} graph")

        neighbors: dict[str, set[str]] = {}
        for u, v in g.edges:
            neighbors.setdefault(u, set()).add(v)
            neighbors.setdefault(v, set()).add(u)

        kept = {account}
        frontier = [account]
        truncated = False
        for _ in range(hops):
            nxt = []
            for node in frontier:
                for peer in sorted(neighbors.get(node, ())):
                    if peer in kept:
                        continue
                    if len(kept) >= cap:
                        truncated = True
                        break
                    kept.add(peer)
                    nxt.append(peer)
                if truncated:
                    break
            if truncated or not nxt:
                break
            frontier = nxt

        names = runtime.node_names(snap, kind)
        edges = [
            {"src": u, "dst": v, "weight": w}
            for (u, v), w in sorted(g.edges.items())
            if u in kept and v in kept
        ]
        return _envelope(
            snap,
            {
                "kind": kind,
                "account": account,
                "hops": hops,
                "truncated": truncated,
                "nodes": [
                    {"account_id": a, "screen_name": names.get(a, "")}
                    for a in sorted(kept)
                ],
                "edges": edges,
            },
        )

    @app.get("/api/snapshots/{snapshot_id}/influencers")
    def influencers(snapshot_id: str, kind: str = "mention"):
        snap = runtime.snapshot(snapshot_id)
        absent = _absent(snap, f"network/{kind}")
        if absent:
            return _envelope(snap, absent)
        return _envelope(snap, _section_json(snap, f"network/{kind}/influencers.json"))

    @app.get("/api/snapshots/{snapshot_id}/communities")
    def communities(snapshot_id: str, kind: str = "mention"):
        snap = runtime.snapshot(snapshot_id)
        absent = _absent(snap, f"network/{kind}")
        if absent:
            return _envelope(snap, absent)
        return _envelope(snap, _section_json(snap, f"network/{kind}/communities.json"))

    @app.get("/api/snapshots/{snapshot_id}/communities/{community_id}")
    def community_card(snapshot_id: str, community_id: int, kind: str = "mention"):
        snap = runtime.snapshot(snapshot_id)
        absent = _absent(snap, f"network/{kind}")
        if absent:
            return _envelope(snap, absent)
        payload = _section_json(snap, f"network/{kind}/communities.json")
        for card in payload["cards"]:
            if card["community_id"] == community_id:
                return _envelope(snap, card)
        raise _not_found(f"no community card for id {community_id}")

    @app.get("/api/snapshots/{snapshot_id}/calibration")
    def calibration(snapshot_id: str):
        snap = runtime.snapshot(snapshot_id)
        absent = _absent(snap, "calibration")
        if absent:
            return _envelope(snap, absent)
        detectors = {}
        for path in sorted(snap.section_file("calibration").glob("*.json")):
            payload = json.loads(path.read_text(encoding="utf-8"))
            curve_path = snap.section_file(f"calibration/{payload['detector']}_curve.csv")
            curve = []
            if curve_path.exists():
                with open(curve_path, newline="", encoding="utf-8") as fh:
                    for row in csv.reader(fh):
                        if row and row[0] != "threshold":
                            curve.append(
                                [float(row[0]), float(row[1]), float(row[2])]
                            )
            payload["curve"] = curve
            detectors[payload["detector"]] = payload
        return _envelope(snap, {"detectors": detectors})

    @app.post("/api/snapshots/{snapshot_id}/botmatch/session")
    def create_session(snapshot_id: str, body: SessionCreate):
        snap = runtime.snapshot(snapshot_id)
        dtm = runtime.dtm(snap)
        if not body.seeds:
            raise _bad_request("seeds must be non-empty", field="seeds")
        try:
            session = topics.new_session(dtm, body.seeds)
        except KeyError as exc:
            raise _not_found(str(exc.args[0])) from exc
        runtime.sweep_sessions()
        session_id = uuid.uuid4().hex
        slot = _SessionSlot(
            snapshot_id=snap.snapshot_id, session=session, last_used=time.monotonic()
        )
        with runtime.lock:
            runtime.sessions[session_id] = slot
        return _envelope(snap, _session_view(session_id, slot))

    @app.get("/api/snapshots/{snapshot_id}/botmatch/session/{session_id}")
    def get_session(snapshot_id: str, session_id: str):
        snap = runtime.snapshot(snapshot_id)
        slot = runtime.session_slot(session_id)
        if slot.snapshot_id != snap.snapshot_id:
            raise _not_found("session belongs to a different snapshot")
        return _envelope(snap, _session_view(session_id, slot))

    def _apply_action(snapshot_id: str, session_id: str, action) -> dict:
        snap = runtime.snapshot(snapshot_id)
        slot = runtime.session_slot(session_id)
        if slot.snapshot_id != snap.snapshot_id:
            raise _not_found("session belongs to a different snapshot")
        with slot.lock:
            try:
                slot.session = topics.expand(slot.session, action)
            except ValueError as exc:
                raise _bad_request(str(exc)) from exc
            slot.last_used = time.monotonic()
            return _envelope(snap, _session_view(session_id, slot))

    @app.post("/api/snapshots/{snapshot_id}/botmatch/session/{session_id}/step")
    def step_session(snapshot_id: str, session_id: str, body: SessionStep):
        return _apply_action(snapshot_id, session_id, topics.Step(top_n=body.top_n))

    @app.post("/api/snapshots/{snapshot_id}/botmatch/session/{session_id}/accept")
    def accept_candidates(snapshot_id: str, session_id: str, body: SessionIds):
        return _apply_action(snapshot_id, session_id, topics.Accept(tuple(body.ids)))

    @app.post("/api/snapshots/{snapshot_id}/botmatch/session/{session_id}/reject")
    def reject_candidates(snapshot_id: str, session_id: str, body: SessionIds):
        return _apply_action(snapshot_id, session_id, topics.Reject(tuple(body.ids)))

    return app


def serve(store_dir: str | Path, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(store_dir), host=host, port=port, log_level="warning")
