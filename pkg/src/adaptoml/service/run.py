"""Service entry point: `adaptoml-service --host 127.0.0.1 --port 8080`."""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import create_app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="adaptoml-service", description="Run the AutoML job service.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--jobs-root", default="adaptoml_jobs", help="Directory for datasets and job outputs.")
    parser.add_argument("--workers", type=int, default=1, help="Concurrent pipeline executions.")
    parser.add_argument("--frontend", default=None,
                        help="Static UI directory served at / (default: frontend/dist when present).")
    ns = parser.parse_args(argv)
    frontend = ns.frontend
    if frontend is None and os.path.isdir(os.path.join("frontend", "dist")):
        frontend = os.path.join("frontend", "dist")
    app = create_app(jobs_root=ns.jobs_root, workers=ns.workers, frontend_dir=frontend)
    uvicorn.run(app, host=ns.host, port=ns.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
