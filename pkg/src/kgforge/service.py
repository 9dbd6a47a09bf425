"""HTTP facade over the analysis pipeline.

The service is a thin adapter: every endpoint body is exactly what the
corresponding library call returns, serialized canonically.  Sessions
hold an uploaded table plus the latest derived artifacts in memory and
expire after a sliding TTL.  A per-session lock serializes mutations, so
concurrent requests against one session queue instead of interleaving;
distinct sessions proceed in parallel.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .correlation import CorrelationMatrix, correlation_matrix
from .errors import KgforgeError
from .granger import DiscoveryConfig, DiscoveryOutcome, discover
from .ingest import PreprocessConfig, preprocess
from .kg import GraphQuery, KnowledgeGraph, build_graph, filter_graph, to_json, to_turtle
from .table import TimeSeriesTable, parse_csv

DEFAULT_TTL_SECONDS = 3600.0
DEFAULT_MAX_BODY_BYTES = 256 * 1024 * 1024


@dataclass
class Session:
    id: str
    name: str
    raw: TimeSeriesTable
    created_at: float
    expires_at: float
    lock: threading.Lock = dc_field(default_factory=threading.Lock)
    processed: Optional[TimeSeriesTable] = None
    report_json: Optional[dict] = None
    matrices: dict[str, CorrelationMatrix] = dc_field(default_factory=dict)
    discovery: Optional[DiscoveryOutcome] = None
    graph: Optional[KnowledgeGraph] = None


class SessionStore:
    def __init__(self, ttl_seconds: float):
        self.ttl = ttl_seconds
        self._guard = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def _purge(self, now: float):
        dead = [sid for sid, s in self._sessions.items() if s.expires_at <= now]
        for sid in dead:
            del self._sessions[sid]

    def create(self, name: str, table: TimeSeriesTable) -> Session:
        now = time.monotonic()
        with self._guard:
            self._purge(now)
            sid = secrets.token_hex(12)
            session = Session(
                id=sid, name=name, raw=table, created_at=now, expires_at=now + self.ttl
            )
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Session:
        now = time.monotonic()
        with self._guard:
            self._purge(now)
            session = self._sessions.get(sid)
            if session is None:
                raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
            session.expires_at = now + self.ttl  # sliding expiry
            return session


class PreprocessRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    imputation: Literal["mean", "median", "forward_fill", "linear_interpolation", "drop_rows"] = "mean"
    encoding: Literal["ordinal", "one_hot"] = "ordinal"
    columns: Optional[list[str]] = None


class CorrelationRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    method: Literal["pearson", "spearman", "euclidean"] = "pearson"


class GrangerRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    alpha: float = 0.05
    p_max: Optional[int] = None
    lag_policy: Literal["fixed", "information_criterion", "scan_best"] = "scan_best"
    fixed_p: int = 1
    criterion: Literal["aic", "bic"] = "bic"
    multiple_testing: Literal["none", "benjamini_hochberg"] = "none"
    auto_stationarity: bool = True
    adf_alpha: float = 0.05
    denominator_df: Literal["horizon", "residual"] = "horizon"
    conditioning: Literal["pairwise", "full"] = "pairwise"

    def to_config(self) -> DiscoveryConfig:
        return DiscoveryConfig(**self.model_dump())


class GraphRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    corr_threshold: float = 0.5
    alpha: float = 0.05
    method: Literal["pearson", "spearman", "euclidean"] = "pearson"
    created_at: Optional[str] = None


class FilterRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kinds: Optional[list[Literal["correlation", "causal"]]] = None
    min_abs_weight: Optional[float] = None
    max_p_value: Optional[float] = None
    lag_range: Optional[tuple[int, int]] = None
    nodes: Optional[list[str]] = None
    neighborhood_radius: Optional[int] = None

    def to_query(self) -> GraphQuery:
        return GraphQuery(
            kinds=frozenset(self.kinds) if self.kinds is not None else None,
            min_abs_weight=self.min_abs_weight,
            max_p_value=self.max_p_value,
            lag_range=self.lag_range,
            nodes=frozenset(self.nodes) if self.nodes is not None else None,
            neighborhood_radius=self.neighborhood_radius,
        )


def default_static_dir() -> Path:
    return Path(__file__).resolve().parents[2] / "frontend" / "dist"


def _require_processed(session: Session) -> TimeSeriesTable:
    if session.processed is None:
        raise HTTPException(status_code=409, detail="preprocess the dataset first")
    return session.processed


def _ensure_matrix(session: Session, method: str) -> CorrelationMatrix:
    table = _require_processed(session)
    if method not in session.matrices:
        session.matrices[method] = correlation_matrix(table, method)
    return session.matrices[method]


def _ensure_discovery(session: Session) -> DiscoveryOutcome:
    table = _require_processed(session)
    if session.discovery is None:
        session.discovery = discover(table, DiscoveryConfig())
    return session.discovery


def create_app(
    ttl_seconds: float | None = None,
    max_body_bytes: int | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    if ttl_seconds is None:
        ttl_seconds = float(os.environ.get("KGF_SESSION_TTL_SECONDS", DEFAULT_TTL_SECONDS))
    if max_body_bytes is None:
        max_body_bytes = int(os.environ.get("KGF_MAX_BODY_BYTES", DEFAULT_MAX_BODY_BYTES))
    if static_dir is None:
        static_dir = default_static_dir()

    app = FastAPI(title="kgforge", docs_url="/api/docs", openapi_url="/api/openapi.json")
    store = SessionStore(ttl_seconds)
    app.state.store = store

    @app.exception_handler(KgforgeError)
    def _domain_error(request: Request, exc: KgforgeError) -> JSONResponse:
        detail = [{"loc": ["body"], "msg": str(exc), "type": type(exc).__name__}]
        return JSONResponse(status_code=422, content={"detail": detail})

    @app.middleware("http")
    async def _limit_body(request: Request, call_next):
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > max_body_bytes:
            return JSONResponse(status_code=413, content={"detail": "request body too large"})
        return await call_next(request)

    @app.post("/api/datasets", status_code=201)
    async def upload(request: Request, name: str = Query(default="dataset")):
        body = await request.body()
        if len(body) > max_body_bytes:
            raise HTTPException(status_code=413, detail="request body too large")
        text = body.decode("utf-8", errors="replace")
        table = parse_csv(text, source=name)
        session = store.create(name, table)
        return {
            "session_id": session.id,
            "columns": [
                {"name": c.name, "kind": c.kind, "missing_count": c.missing_count}
                for c in table.columns
            ],
        }

    @app.post("/api/datasets/{sid}/preprocess")
    def run_preprocess(sid: str, req: PreprocessRequest):
        session = store.get(sid)
        with session.lock:
            config = PreprocessConfig(
                imputation=req.imputation,
                encoding=req.encoding,
                selected_columns=tuple(req.columns) if req.columns is not None else None,
            )
            table, report = preprocess(session.raw, config)
            session.processed = table
            session.matrices = {}
            session.discovery = None
            session.graph = None
            session.report_json = {
                "imputed_cells": report.imputed_cells,
                "dropped_rows": report.dropped_rows,
                "encoding_map": report.encoding_map.to_json_dict(),
                "columns": list(table.names),
            }
            return session.report_json

    @app.post("/api/datasets/{sid}/correlation")
    def run_correlation(sid: str, req: CorrelationRequest):
        session = store.get(sid)
        with session.lock:
            return _ensure_matrix(session, req.method).to_json_dict()

    @app.post("/api/datasets/{sid}/granger")
    def run_granger(sid: str, req: GrangerRequest):
        session = store.get(sid)
        with session.lock:
            table = _require_processed(session)
            session.discovery = discover(table, req.to_config())
            return session.discovery.to_json_dict()

    @app.post("/api/datasets/{sid}/graph")
    def run_graph(sid: str, req: GraphRequest):
        session = store.get(sid)
        with session.lock:
            matrix = _ensure_matrix(session, req.method)
            outcome = _ensure_discovery(session)
            session.graph = build_graph(
                matrix,
                outcome.results,
                corr_threshold=req.corr_threshold,
                alpha=req.alpha,
                dataset=session.name,
                created_at=req.created_at,
                config=outcome.config.to_json_dict(),
                integration=outcome.integration.to_json_dict(),
            )
            return Response(content=to_json(session.graph), media_type="application/json")

    @app.get("/api/datasets/{sid}/graph.ttl")
    def graph_turtle(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.graph is None:
                raise HTTPException(status_code=409, detail="build the graph first")
            return PlainTextResponse(to_turtle(session.graph), media_type="text/turtle")

    @app.post("/api/datasets/{sid}/graph/filter")
    def graph_filter(sid: str, req: FilterRequest, format: str = Query(default="json")):
        session = store.get(sid)
        with session.lock:
            if session.graph is None:
                raise HTTPException(status_code=409, detail="build the graph first")
            filtered = filter_graph(session.graph, req.to_query())
            if format == "ttl":
                return PlainTextResponse(to_turtle(filtered), media_type="text/turtle")
            if format != "json":
                raise HTTPException(status_code=422, detail="format must be json or ttl")
            return Response(content=to_json(filtered), media_type="application/json")

    static_path = Path(static_dir)
    if static_path.is_dir():
        app.mount("/", StaticFiles(directory=static_path, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return (
                "<!doctype html><title>kgforge</title>"
                "<p>UI bundle not built; the JSON API lives under /api.</p>"
            )

    return app


def serve(
    host: str = "127.0.0.1",
    port: int | None = None,
    ttl_seconds: float | None = None,
    max_body_bytes: int | None = None,
    static_dir: str | None = None,
):
    """Blocking uvicorn runner used by the CLI."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("KGF_PORT", "8000"))
    app = create_app(ttl_seconds=ttl_seconds, max_body_bytes=max_body_bytes, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)
