"""Pydantic request/response documents; field names mirror PipelineConfig exactly."""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict

from ..dataset import DEFAULT_MISSING_MARKERS


class JobConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    data_path: str
    label_column: str
    personalization_column: str
    task: str
    impute: Optional[str] = None
    test_frac: float = 0.2
    val_frac: float = 0.2
    normalize: Optional[str] = None
    feature_extraction: Optional[Union[int, str]] = None
    feature_selection: Optional[str] = None
    families: Optional[list[str]] = None
    criterion: Optional[str] = None
    fit: bool = True
    predict_path: Optional[str] = None
    partial_fit_path: Optional[str] = None
    sessions: int = 4
    adapt: bool = False
    model_paths: list[str] = []
    out_dir: Optional[str] = None
    seed: int = 42
    export_features: Optional[str] = None
    stratify: bool = False
    missing_markers: list[str] = list(DEFAULT_MISSING_MARKERS)
    user_train_frac: float = 0.5


class SchemaColumn(BaseModel):
    name: str
    kind: str


class SchemaResponse(BaseModel):
    dataset_ref: str
    columns: list[SchemaColumn]
    n_rows: int


class UploadResponse(BaseModel):
    dataset_ref: str


class SubmitResponse(BaseModel):
    job_id: str


class Progress(BaseModel):
    stage: Optional[str] = None
    candidates_done: Optional[int] = None
    candidates_total: Optional[int] = None


class JobView(BaseModel):
    job_id: str
    state: str
    progress: Progress
    error: Optional[str] = None
    artifacts: list[str] = []


class ArtifactEntry(BaseModel):
    name: str
    size: int
    content_type: str


class ArtifactIndex(BaseModel):
    job_id: str
    artifacts: list[ArtifactEntry]
