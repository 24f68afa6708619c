"""HTTP JSON API over the prediction/feedback/retrain loop.

All routes live under /v1 and speak JSON. Errors follow
{"code", "message", "details": [...]}. Authentication is a single static
bearer token (set it in ApiConfig or the SCORELOOP_TOKEN environment
variable); /v1/health stays open for liveness probes.

Concurrency: any number of readers hit the currently deployed immutable
(model, preprocessor) pair; retraining takes an exclusive writer slot and
deployment is a single atomic reference swap, so a prediction always
carries the version id of the model that actually scored it.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import DataError, IntegrityError, ModelError, ScoreloopError
from .explain import explain
from .gbdt.model import TrainConfig
from .loop import build_retrain_report, evaluation_history, make_batch, retrain, submit_feedback
from .metrics import MetricsReport
from .preprocess import transform
from .schema import record_from_mapping
from .store import DatasetStore, ModelVersion


@dataclass
class ApiConfig:
    data_dir: str
    at_risk_threshold: float = 65.0
    auto_retrain: bool = False
    token: str | None = None
    train_config: TrainConfig = TrainConfig()
    static_dir: str | None = None  # optional web UI assets

    def __post_init__(self):
        if not (0.0 <= self.at_risk_threshold <= 100.0):
            raise DataError("at_risk_threshold must be in [0, 100]")
        if self.token is None:
            self.token = os.environ.get("SCORELOOP_TOKEN") or None


def _error(status: int, code: str, message: str, details=()) -> JSONResponse:
    return JSONResponse(status_code=status, content={
        "code": code, "message": message, "details": list(details)})


class ServiceState:
    def __init__(self, config: ApiConfig):
        self.config = config
        self.store = DatasetStore.open(config.data_dir)
        self.retrain_lock = threading.Lock()   # exclusive writer slot
        self.feedback_lock = threading.Lock()  # serialized appends
        vid = self.store.latest_version_id()
        self.deployed: ModelVersion | None = (
            self.store.get_version(vid) if vid is not None else None)

    def deploy(self, version: ModelVersion):
        self.deployed = version  # atomic reference swap

    def run_retrain(self, force: bool) -> dict:
        if not self.retrain_lock.acquire(blocking=False):
            raise _Busy()
        try:
            old = self.deployed
            if old is None:
                raise ModelError("no trained model; train an initial version first")
            new = retrain(self.store, self.config.train_config, force=force)
            report = build_retrain_report(self.store, old, new)
            self.deploy(new)  # loop.retrain already wrote the audit line
            return {"version_id": new.version_id,
                    "parent_version": old.version_id,
                    **report.to_dict()}
        finally:
            self.retrain_lock.release()


class _Busy(Exception):
    pass


def create_app(config: ApiConfig) -> FastAPI:
    app = FastAPI(title="scoreloop", version="1")
    state = ServiceState(config)
    app.state.scoreloop = state

    @app.exception_handler(DataError)
    async def _data_error(request, exc):
        return _error(400, "invalid_data", str(exc))

    @app.exception_handler(IntegrityError)
    async def _integrity_error(request, exc):
        return _error(500, "integrity_error", str(exc))

    @app.exception_handler(ModelError)
    async def _model_error(request, exc):
        return _error(503, "no_model", str(exc))

    @app.exception_handler(_Busy)
    async def _busy(request, exc):
        return _error(409, "retrain_in_flight",
                      "a retrain is already holding the writer slot")

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        open_paths = ("/v1/health", "/docs", "/openapi.json", "/redoc")
        if (config.token and request.url.path.startswith("/v1")
                and request.url.path not in open_paths):
            header = request.headers.get("authorization", "")
            if header != f"Bearer {config.token}":
                return _error(401, "unauthorized", "missing or bad bearer token")
        return await call_next(request)

    def require_model() -> ModelVersion:
        deployed = state.deployed
        if deployed is None:
            raise ModelError("no trained model; train an initial version first")
        return deployed

    def parse_records(body, *, require_target: bool):
        if isinstance(body, dict) and "records" in body:
            raw = body["records"]
        elif isinstance(body, list):
            raw = body
        elif isinstance(body, dict):
            raw = [body]
        else:
            raise DataError("body must be a record, a list, or {records: [...]}")
        if not raw:
            raise DataError("no records supplied")
        records, problems = [], []
        for i, m in enumerate(raw):
            if not isinstance(m, dict):
                problems.append(f"record {i}: not an object")
                continue
            try:
                records.append(record_from_mapping(
                    state.store.schema, m, record_id=f"request-{i + 1}",
                    require_target=require_target))
            except DataError as e:
                problems.append(f"record {i}: {e}")
        if problems:
            raise DataError("; ".join(problems))
        return records

    @app.get("/v1/health")
    def health():
        deployed = state.deployed
        return {
            "status": "ok" if deployed is not None else "untrained",
            "version_id": deployed.version_id if deployed else None,
        }

    @app.post("/v1/predict")
    async def predict(request: Request):
        deployed = require_model()  # single grab: no torn versions
        records = parse_records(await request.json(), require_target=False)
        results = []
        for r in records:
            score = deployed.model.predict(transform(r, deployed.preprocessor).values)
            results.append({
                "id": r.id,
                "score": score,
                "at_risk": bool(score < config.at_risk_threshold),
            })
        return {
            "version_id": deployed.version_id,
            "threshold": config.at_risk_threshold,
            "predictions": results,
        }

    @app.post("/v1/explain")
    async def explain_record(request: Request):
        deployed = require_model()
        records = parse_records(await request.json(), require_target=False)
        if len(records) != 1:
            raise DataError("explain takes exactly one record")
        return _explanation_payload(deployed, records[0])

    @app.get("/v1/explain")
    def explain_by_id(record_id: str):
        deployed = require_model()
        for row in state.store.full_dataset().rows:
            if row.id == record_id:
                return _explanation_payload(deployed, row)
        raise DataError(f"no stored record with id {record_id!r}")

    def _explanation_payload(deployed: ModelVersion, record):
        fv = transform(record, deployed.preprocessor)
        result = explain(deployed.model, fv.values)
        names = deployed.model.feature_names
        return {
            "version_id": deployed.version_id,
            "id": record.id,
            "base_value": result.base_value,
            "prediction": result.prediction,
            "contributions": result.to_rows(names, fv.values),
        }

    @app.post("/v1/feedback")
    async def feedback(request: Request):
        require_model()
        body = await request.json()
        note = body.get("note", "") if isinstance(body, dict) else ""
        records = parse_records(body, require_target=True)
        if config.auto_retrain and state.retrain_lock.locked():
            raise _Busy()
        with state.feedback_lock:
            ids = submit_feedback(state.store, make_batch(records, note=note))
        triggered = False
        if config.auto_retrain:
            state.run_retrain(force=False)
            triggered = True
        return {
            "accepted": len(ids),
            "ids": ids,
            "store_size": state.store.row_count(),
            "retrain_triggered": triggered,
        }

    @app.post("/v1/retrain")
    def retrain_endpoint(force: bool = False):
        require_model()
        try:
            return state.run_retrain(force=force)
        except DataError as e:
            if "no new feedback" in str(e):
                return _error(409, "nothing_to_retrain", str(e))
            raise
        except (ModelError, _Busy):
            raise
        except Exception as e:  # training failure: old version stays deployed
            return _error(500, "retrain_failed", str(e))

    @app.get("/v1/metrics/history")
    def metrics_history():
        hist = evaluation_history(state.store)
        return {"history": [m.to_dict() for m in hist],
                "versions": state.store.list_versions()}

    @app.get("/v1/model/current")
    def model_current():
        deployed = require_model()
        return {
            "version_id": deployed.version_id,
            "parent_version": deployed.parent_version,
            "trained_on_count": deployed.trained_on_count,
            "metrics": deployed.metrics.to_dict(),
            "config": deployed.model.config.to_dict(),
            "feature_names": list(deployed.model.feature_names),
            "threshold": config.at_risk_threshold,
        }

    if config.static_dir:
        @app.get("/")
        def index():
            return FileResponse(os.path.join(config.static_dir, "index.html"))

        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app


def serve(config: ApiConfig, host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port)
