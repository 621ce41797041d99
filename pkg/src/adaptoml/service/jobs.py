"""In-memory job index with on-disk artifacts and a bounded worker pool.

State machine: queued -> running -> succeeded | failed. Jobs found on disk at
startup in a non-terminal state are marked failed(interrupted); there is no
checkpointing.
"""

from __future__ import annotations

import json
import os
import queue
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from ..errors import AdaptomlError
from ..pipeline import PipelineConfig, run_pipeline

QUEUED, RUNNING, SUCCEEDED, FAILED = "queued", "running", "succeeded", "failed"


@dataclass
class JobRecord:
    job_id: str
    config: PipelineConfig
    state: str = QUEUED
    stage: Optional[str] = None
    candidates_done: Optional[int] = None
    candidates_total: Optional[int] = None
    error: Optional[str] = None
    artifacts: list[str] = field(default_factory=list)
    out_dir: str = ""

    def view(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "progress": {
                "stage": self.stage,
                "candidates_done": self.candidates_done,
                "candidates_total": self.candidates_total,
            },
            "error": self.error,
            "artifacts": list(self.artifacts),
        }


class JobStore:
    """Single-writer job registry; reads take snapshots under the lock."""

    def __init__(self, root: str, workers: int = 1):
        self.root = root
        self.jobs_dir = os.path.join(root, "jobs")
        self.datasets_dir = os.path.join(root, "datasets")
        os.makedirs(self.jobs_dir, exist_ok=True)
        os.makedirs(self.datasets_dir, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        self._queue: "queue.Queue[Optional[str]]" = queue.Queue()
        self._threads: list[threading.Thread] = []
        self._workers = max(1, workers)
        self._recover_interrupted()

    # -- lifecycle --
    def start(self):
        if self._threads:
            return
        for i in range(self._workers):
            t = threading.Thread(target=self._worker_loop, name=f"job-worker-{i}", daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self):
        for _ in self._threads:
            self._queue.put(None)
        for t in self._threads:
            t.join(timeout=5)
        self._threads = []

    # -- API used by the HTTP layer --
    def submit(self, config: PipelineConfig) -> str:
        job_id = uuid.uuid4().hex
        out_dir = os.path.join(self.jobs_dir, job_id, "out")
        config.out_dir = out_dir
        record = JobRecord(job_id=job_id, config=config, out_dir=out_dir)
        with self._lock:
            self._jobs[job_id] = record
        self._persist_state(record)
        self._queue.put(job_id)
        return job_id

    def get(self, job_id: str) -> Optional[JobRecord]:
        with self._lock:
            return self._jobs.get(job_id)

    def view(self, job_id: str) -> Optional[dict]:
        with self._lock:
            record = self._jobs.get(job_id)
            return None if record is None else record.view()

    # -- worker internals --
    def _worker_loop(self):
        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            self._execute(job_id)

    def _execute(self, job_id: str):
        record = self.get(job_id)
        if record is None:
            return
        with self._lock:
            record.state = RUNNING
        self._persist_state(record)

        def on_progress(stage, done, total):
            with self._lock:
                record.stage = stage
                if done is not None:
                    record.candidates_done = done
                    record.candidates_total = total

        try:
            run = run_pipeline(record.config, on_progress=on_progress)
            with self._lock:
                record.state = SUCCEEDED
                record.artifacts = [os.path.basename(p) for p in run.artifacts]
        except AdaptomlError as exc:
            with self._lock:
                record.state = FAILED
                record.error = str(exc)
        except Exception as exc:  # defensive: a crash must not kill the worker
            with self._lock:
                record.state = FAILED
                record.error = f"internal error: {exc}"
        self._persist_state(record)

    # -- durability (state only; artifacts live in out_dir) --
    def _state_path(self, job_id: str) -> str:
        return os.path.join(self.jobs_dir, job_id, "state.json")

    def _persist_state(self, record: JobRecord):
        os.makedirs(os.path.join(self.jobs_dir, record.job_id), exist_ok=True)
        with open(self._state_path(record.job_id), "w", encoding="utf-8") as fh:
            json.dump(record.view(), fh)

    def _recover_interrupted(self):
        if not os.path.isdir(self.jobs_dir):
            return
        for job_id in sorted(os.listdir(self.jobs_dir)):
            path = self._state_path(job_id)
            if not os.path.isfile(path):
                continue
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    doc = json.load(fh)
            except (OSError, json.JSONDecodeError):
                continue
            record = JobRecord(job_id=job_id, config=PipelineConfig(),
                               out_dir=os.path.join(self.jobs_dir, job_id, "out"))
            record.state = doc.get("state", FAILED)
            record.error = doc.get("error")
            record.artifacts = doc.get("artifacts", [])
            if record.state in (QUEUED, RUNNING):
                record.state = FAILED
                record.error = "failed(interrupted): service restarted mid-run"
                self._persist_state(record)
            with self._lock:
                self._jobs[job_id] = record
