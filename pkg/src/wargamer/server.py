"""HTTP planning service.

Multi-client FastAPI app over the document store and the simulation
engine.  Clients poll for run completion; plan edits use optimistic
versioning (409 on conflict, current payload returned for rebase);
validation findings come back as 422 with the findings in the body.

Configuration via environment variables:

- ``WARGAMER_DATA_DIR`` -- document store directory (default ``./wargamer-data``)
- ``WARGAMER_HOST`` / ``WARGAMER_PORT`` -- listen address (default 127.0.0.1:8410)
"""

from __future__ import annotations

import math
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Literal

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import analytics, coa, engine
from .model import scenario_from_dict, validate_graph
from .plan import plan_from_dict, validate_plan
from .store import DocumentStore, UnknownDocument, content_hash

DEFAULT_DATA_DIR = "./wargamer-data"
DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8410

RUN_WORKERS = 4


# ---------------------------------------------------------------------------
# Wire schemas


class CreateDocumentRequest(BaseModel):
    kind: Literal["scenario", "plan", "runResult", "analyticsInput"]
    payload: dict


class DocumentSummary(BaseModel):
    docId: str
    kind: str
    version: int
    contentHash: str


class DocumentResponse(DocumentSummary):
    payload: dict
    history: list[dict]


class UpdatePlanRequest(BaseModel):
    expectedVersion: int
    payload: dict


class ConflictResponse(BaseModel):
    conflict: bool = True
    currentVersion: int
    currentPayload: dict


class RunRequest(BaseModel):
    scenarioId: str
    hypothesis: str | None = None
    planId: str
    horizonTicks: int = Field(ge=1)
    seed: int = 0
    noiseEnabled: bool = False
    theta: float = engine.DEFAULT_THETA
    persistence: int = engine.DEFAULT_PERSISTENCE


class RunStatus(BaseModel):
    runId: str
    status: Literal["pending", "done", "failed"]
    resultDocId: str | None = None
    reason: str | None = None


class PfnetRequest(BaseModel):
    concepts: list[str]
    ratings: list[list[float]]
    q: int | None = None
    r: float | str = "inf"


class TlxRequest(BaseModel):
    ratings: list[float]
    pairwiseWins: list[int]


class SnaRequest(BaseModel):
    events: list[dict]
    window: tuple[float, float] | None = None


class TrendRequest(BaseModel):
    series: list[tuple[float, float]]


class TrustRequest(BaseModel):
    items: list[int]
    reverseCoded: list[bool]


@dataclass
class _Run:
    run_id: str
    status: str = "pending"
    result_doc_id: str | None = None
    reason: str | None = None


@dataclass
class RunManager:
    """Bounded FIFO worker pool for simulation runs.

    Run registry is in-memory; completed results are persisted as runResult
    documents with provenance hashes of their inputs.
    """

    store: DocumentStore
    executor: ThreadPoolExecutor = field(
        default_factory=lambda: ThreadPoolExecutor(max_workers=RUN_WORKERS)
    )
    runs: dict[str, _Run] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def submit(self, req: RunRequest) -> _Run:
        run = _Run(run_id=uuid.uuid4().hex[:12])
        with self.lock:
            self.runs[run.run_id] = run
        self.executor.submit(self._execute, run, req)
        return run

    def get(self, run_id: str) -> _Run:
        with self.lock:
            if run_id not in self.runs:
                raise UnknownDocument(run_id)
            return self.runs[run_id]

    def _execute(self, run: _Run, req: RunRequest) -> None:
        try:
            scenario_doc = self.store.get(req.scenarioId)
            plan_doc = self.store.get(req.planId)
            scenario = scenario_from_dict(scenario_doc.payload)
            plan = plan_from_dict(plan_doc.payload)
            hyp = scenario.hypothesis(req.hypothesis)
            findings = validate_graph(hyp.graph).errors() + validate_plan(
                plan, hyp.graph
            ).errors()
            if findings:
                raise ValueError(
                    "validation failed: " + "; ".join(f.message for f in findings)
                )
            cfg = engine.RunConfig(req.horizonTicks, req.seed, req.noiseEnabled)
            base = engine.baseline(hyp.graph, cfg)
            traj = engine.simulate(hyp.graph, plan, cfg)
            effects = engine.detect_effects(base, traj, req.theta, req.persistence)
            result = engine.run_result_to_dict(
                base, traj, effects, cfg,
                scenario_hash=scenario_doc.content_hash,
                plan_hash=plan_doc.content_hash,
                hypothesis=hyp.name,
                theta=req.theta,
                persistence=req.persistence,
            )
            doc = self.store.create("runResult", result)
            with self.lock:
                run.status = "done"
                run.result_doc_id = doc.doc_id
        except (UnknownDocument, KeyError) as exc:
            with self.lock:
                run.status = "failed"
                run.reason = f"unknown reference: {exc}"
        except Exception as exc:
            with self.lock:
                run.status = "failed"
                run.reason = str(exc)


def _validate_payload(kind: str, payload: dict) -> list[dict]:
    """Kind-specific validation findings for a document payload."""
    try:
        if kind == "scenario":
            scenario = scenario_from_dict(payload)
            findings = []
            for hyp in scenario.hypotheses:
                findings.extend(validate_graph(hyp.graph).errors())
            return [{"level": f.level, "code": f.code, "message": f.message}
                    for f in findings]
        if kind == "plan":
            plan = plan_from_dict(payload)
            # graph-independent checks only; target resolution happens at run time
            report = validate_plan(plan, graph=None)
            return [{"level": f.level, "code": f.code, "message": f.message}
                    for f in report.errors()]
    except (ValueError, KeyError, TypeError) as exc:
        return [{"level": "error", "code": "parse-error", "message": str(exc)}]
    return []


def create_app(data_dir: str | None = None) -> FastAPI:
    store = DocumentStore(data_dir or os.environ.get("WARGAMER_DATA_DIR", DEFAULT_DATA_DIR))
    runner = RunManager(store)
    app = FastAPI(title="wargamer planning service")
    app.state.store = store
    app.state.runner = runner

    def summary(doc) -> DocumentSummary:
        return DocumentSummary(
            docId=doc.doc_id, kind=doc.kind, version=doc.version,
            contentHash=doc.content_hash,
        )

    @app.post("/documents", response_model=DocumentResponse, status_code=201)
    def create_document(req: CreateDocumentRequest):
        findings = _validate_payload(req.kind, req.payload)
        if findings:
            return JSONResponse(status_code=422, content={"findings": findings})
        doc = store.create(req.kind, req.payload)
        return DocumentResponse(
            docId=doc.doc_id, kind=doc.kind, version=doc.version,
            contentHash=doc.content_hash, payload=doc.payload, history=doc.history,
        )

    @app.get("/documents", response_model=list[DocumentSummary])
    def list_documents(kind: str | None = None):
        return [summary(doc) for doc in store.list(kind)]

    @app.get("/documents/{doc_id}", response_model=DocumentResponse)
    def get_document(doc_id: str):
        try:
            doc = store.get(doc_id)
        except UnknownDocument:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id}")
        return DocumentResponse(
            docId=doc.doc_id, kind=doc.kind, version=doc.version,
            contentHash=doc.content_hash, payload=doc.payload, history=doc.history,
        )

    @app.put("/plans/{doc_id}")
    def update_plan(doc_id: str, req: UpdatePlanRequest):
        try:
            doc = store.get(doc_id)
        except UnknownDocument:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id}")
        if doc.kind != "plan":
            raise HTTPException(status_code=400, detail=f"{doc_id} is not a plan")
        findings = _validate_payload("plan", req.payload)
        if findings:
            return JSONResponse(status_code=422, content={"findings": findings})
        result = store.update(doc_id, req.expectedVersion, req.payload)
        if not result.accepted:
            return JSONResponse(
                status_code=409,
                content={
                    "conflict": True,
                    "currentVersion": result.version,
                    "currentPayload": result.payload,
                },
            )
        return {"docId": doc_id, "version": result.version,
                "contentHash": result.content_hash}

    @app.post("/runs", response_model=RunStatus, status_code=202)
    def start_run(req: RunRequest):
        for ref in (req.scenarioId, req.planId):
            try:
                store.get(ref)
            except UnknownDocument:
                raise HTTPException(status_code=404, detail=f"unknown document {ref}")
        run = runner.submit(req)
        return RunStatus(runId=run.run_id, status=run.status)

    @app.get("/runs/{run_id}", response_model=RunStatus)
    def get_run(run_id: str):
        try:
            run = runner.get(run_id)
        except UnknownDocument:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        return RunStatus(
            runId=run.run_id, status=run.status,
            resultDocId=run.result_doc_id, reason=run.reason,
        )

    @app.get("/runs/{run_id}/effects")
    def get_run_effects(run_id: str):
        try:
            run = runner.get(run_id)
        except UnknownDocument:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        if run.status != "done":
            raise HTTPException(status_code=409, detail=f"run is {run.status}")
        doc = store.get(run.result_doc_id)
        return {"runId": run_id, "effects": doc.payload["effects"]}

    @app.post("/analytics/pfnet")
    def analytics_pfnet(req: PfnetRequest):
        try:
            sim = analytics.SimilarityMatrix(tuple(req.concepts), req.ratings)
            d = analytics.to_distances(sim)
            q = req.q if req.q is not None else len(req.concepts) - 1
            r = math.inf if req.r in ("inf", "infinity") else float(req.r)
            net = analytics.pfnet(d, q, r, nodes=list(req.concepts))
        except analytics.AnalyticsError as exc:
            return JSONResponse(status_code=422, content={"findings": [
                {"level": "error", "code": "analytics", "message": str(exc)}]})
        return {
            "nodes": list(net.nodes),
            "links": [
                {"a": a, "b": b, "weight": w}
                for (a, b), w in sorted(net.links.items())
            ],
            "q": net.q,
            "r": "inf" if math.isinf(net.r) else net.r,
        }

    @app.post("/analytics/tlx")
    def analytics_tlx(req: TlxRequest):
        try:
            resp = analytics.TlxResponse(tuple(req.ratings), tuple(req.pairwiseWins))
        except analytics.AnalyticsError as exc:
            return JSONResponse(status_code=422, content={"findings": [
                {"level": "error", "code": "analytics", "message": str(exc)}]})
        return {"score": analytics.tlx_score(resp)}

    @app.post("/analytics/sna")
    def analytics_sna(req: SnaRequest):
        try:
            events = [
                analytics.InteractionEvent(
                    source=e["source"],
                    destination=e["destination"],
                    start_time=float(e.get("timestamp", 0.0)),
                    duration_seconds=float(e["durationSeconds"]),
                    kind=e["kind"],
                    source_group=e.get("sourceGroup", ""),
                    dest_group=e.get("destGroup", ""),
                    source_role=e.get("sourceRole", ""),
                    dest_role=e.get("destRole", ""),
                )
                for e in req.events
            ]
            metrics = analytics.sna_metrics(events, req.window)
        except (analytics.AnalyticsError, KeyError, ValueError) as exc:
            return JSONResponse(status_code=422, content={"findings": [
                {"level": "error", "code": "analytics", "message": str(exc)}]})
        return {
            "density": metrics.density,
            "weightedDegree": metrics.weighted_degree,
            "betweenness": metrics.betweenness,
            "crossGroupFraction": metrics.cross_group_fraction,
        }

    @app.post("/analytics/trend")
    def analytics_trend(req: TrendRequest):
        try:
            res = analytics.trend(req.series)
        except analytics.AnalyticsError as exc:
            return JSONResponse(status_code=422, content={"findings": [
                {"level": "error", "code": "analytics", "message": str(exc)}]})
        return {"slope": res.statistic, "rSquared": res.r_squared,
                "pValue": res.p_value, "n": res.n}

    @app.post("/analytics/trust")
    def analytics_trust(req: TrustRequest):
        try:
            resp = analytics.TrustResponse(tuple(req.items), tuple(req.reverseCoded))
        except analytics.AnalyticsError as exc:
            return JSONResponse(status_code=422, content={"findings": [
                {"level": "error", "code": "analytics", "message": str(exc)}]})
        return {"score": analytics.trust_score(resp)}

    return app


def main() -> None:
    import uvicorn

    host = os.environ.get("WARGAMER_HOST", DEFAULT_HOST)
    port = int(os.environ.get("WARGAMER_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
