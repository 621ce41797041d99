"""HTTP job service: dataset upload, schema inspection, job submission and artifacts."""

from __future__ import annotations

import hashlib
import os
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from ..cli import PARAM_DOCS
from ..dataset import load_csv
from ..errors import ConfigError, DataError
from ..pipeline import PipelineConfig, validate_config
from .jobs import SUCCEEDED, JobStore
from .schemas import (
    ArtifactEntry,
    ArtifactIndex,
    JobConfig,
    JobView,
    SchemaColumn,
    SchemaResponse,
    SubmitResponse,
    UploadResponse,
)

DEFAULT_UPLOAD_LIMIT = 64 * 1024 * 1024

CONTENT_TYPES = {
    ".csv": "text/csv",
    ".svg": "image/svg+xml",
    ".json": "application/json",
    ".txt": "text/plain",
    ".amxf": "application/octet-stream",
}


def create_app(jobs_root: str = "adaptoml_jobs", upload_limit: int = DEFAULT_UPLOAD_LIMIT,
               workers: int = 1, frontend_dir: str | None = None) -> FastAPI:
    store = JobStore(jobs_root, workers=workers)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        store.start()
        yield
        store.stop()

    app = FastAPI(title="adaptoml service", lifespan=lifespan)
    app.state.store = store

    @app.post("/api/datasets", response_model=UploadResponse)
    async def upload_dataset(request: Request):
        body = await request.body()
        if not body:
            raise HTTPException(status_code=400, detail="empty dataset upload")
        if len(body) > upload_limit:
            raise HTTPException(status_code=400, detail=f"upload exceeds {upload_limit} bytes")
        ref = hashlib.sha256(body).hexdigest()
        path = os.path.join(store.datasets_dir, f"{ref}.csv")
        if not os.path.exists(path):
            with open(path, "wb") as fh:
                fh.write(body)
        return UploadResponse(dataset_ref=ref)

    def _dataset_path(ref: str) -> str:
        safe = os.path.basename(ref)
        path = os.path.join(store.datasets_dir, f"{safe}.csv")
        if not os.path.isfile(path):
            raise HTTPException(status_code=404, detail=f"unknown dataset ref '{ref}'")
        return path

    @app.get("/api/datasets/{ref}/schema", response_model=SchemaResponse)
    def dataset_schema(ref: str):
        path = _dataset_path(ref)
        try:
            dataset = load_csv(path)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return SchemaResponse(
            dataset_ref=ref,
            columns=[SchemaColumn(name=c.name, kind=c.kind) for c in dataset.schema.columns],
            n_rows=dataset.n_rows,
        )

    @app.post("/api/jobs", response_model=SubmitResponse, status_code=202)
    def submit_job(config: JobConfig):
        cfg = PipelineConfig(**config.model_dump())
        # a bare dataset ref resolves to the uploaded file; real paths pass through
        candidate = os.path.join(store.datasets_dir, f"{os.path.basename(cfg.data_path)}.csv")
        if not os.path.exists(cfg.data_path) and os.path.isfile(candidate):
            cfg.data_path = candidate
        cfg.out_dir = None  # the store owns job output directories
        try:
            validate_config(cfg)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=exc.errors)
        return SubmitResponse(job_id=store.submit(cfg))

    def _job_view(job_id: str) -> dict:
        view = store.view(job_id)
        if view is None:
            raise HTTPException(status_code=404, detail=f"unknown job '{job_id}'")
        return view

    @app.get("/api/jobs/{job_id}", response_model=JobView)
    def job_status(job_id: str):
        return _job_view(job_id)

    @app.get("/api/jobs/{job_id}/artifacts", response_model=ArtifactIndex)
    def job_artifacts(job_id: str):
        view = _job_view(job_id)
        if view["state"] != SUCCEEDED:
            raise HTTPException(status_code=409, detail=f"job is {view['state']}, not succeeded")
        record = store.get(job_id)
        entries = []
        for name in view["artifacts"]:
            path = os.path.join(record.out_dir, name)
            if os.path.isfile(path):
                ext = os.path.splitext(name)[1]
                entries.append(ArtifactEntry(
                    name=name,
                    size=os.path.getsize(path),
                    content_type=CONTENT_TYPES.get(ext, "application/octet-stream"),
                ))
        return ArtifactIndex(job_id=job_id, artifacts=entries)

    @app.get("/api/jobs/{job_id}/artifacts/{name}")
    def job_artifact(job_id: str, name: str):
        view = _job_view(job_id)
        if view["state"] != SUCCEEDED:
            raise HTTPException(status_code=409, detail=f"job is {view['state']}, not succeeded")
        if name not in view["artifacts"] or os.path.basename(name) != name:
            raise HTTPException(status_code=404, detail=f"unknown artifact '{name}'")
        record = store.get(job_id)
        path = os.path.join(record.out_dir, name)
        if not os.path.isfile(path):
            raise HTTPException(status_code=404, detail=f"artifact '{name}' missing on disk")
        ext = os.path.splitext(name)[1]
        return FileResponse(path, media_type=CONTENT_TYPES.get(ext, "application/octet-stream"))

    @app.get("/api/parameter-docs")
    def parameter_docs():
        return PARAM_DOCS

    if frontend_dir and os.path.isdir(frontend_dir):
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
