"""Session-oriented HTTP API for the interactive explorer.

One pipeline run is loaded into a session; its matrices and proposals are
immutable, and only the selection configuration changes afterwards, so the
explorer can re-threshold and re-evaluate live without re-running search.
"""

from __future__ import annotations

import io
import math
import os
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from PIL import Image
from pydantic import BaseModel, Field

from .config import PipelineConfig
from .dataset import Traverse
from .evaluation import Metrics, evaluate_matches, pr_curve
from .matching import MatchSet, SelectionConfig, apply_selection
from .pipeline import PipelineResult, run_pipeline
from .search import ScoreMatrix, cone_offsets, trajectory_score, velocity_grid

# Responses above this many cells must be requested downsampled (or tiled by
# the client); it keeps a misclicked full-matrix fetch from serializing
# gigabytes of JSON.
MAX_PAYLOAD_CELLS = 4_000_000


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str):
        self.status = status
        self.error = error
        self.detail = detail
        super().__init__(detail)


@dataclass(frozen=True)
class SelectionSnapshot:
    """The mutable half of a session, swapped in one reference assignment so
    concurrent readers never observe a partially-updated selection."""

    selection: SelectionConfig
    matches: MatchSet
    metrics: Metrics | None


@dataclass
class Session:
    id: str
    config: PipelineConfig
    result: PipelineResult
    current: SelectionSnapshot
    lock: threading.Lock

    @property
    def selection(self) -> SelectionConfig:
        return self.current.selection

    @property
    def matches(self) -> MatchSet:
        return self.current.matches

    @property
    def metrics(self) -> Metrics | None:
        return self.current.metrics

    @property
    def scores_by_method(self) -> dict[str, ScoreMatrix]:
        return {self.config.search.method: self.result.scores}


def build_session(cfg: PipelineConfig, workers: int = 1) -> Session:
    result = run_pipeline(cfg, workers=workers)
    return Session(
        id=uuid.uuid4().hex,
        config=cfg,
        result=result,
        current=SelectionSnapshot(
            selection=cfg.selection, matches=result.matches, metrics=result.metrics
        ),
        lock=threading.Lock(),
    )


def block_mean(values: np.ndarray, factor: int) -> np.ndarray:
    """Block-average by an integer factor; edge blocks use their actual cells."""
    if factor < 1:
        raise ValueError("downsample factor must be >= 1")
    if factor == 1:
        return values
    n, m = values.shape
    row_idx = np.arange(0, n, factor)
    col_idx = np.arange(0, m, factor)
    sums = np.add.reduceat(np.add.reduceat(values, row_idx, axis=0), col_idx, axis=1)
    row_counts = np.diff(np.append(row_idx, n))
    col_counts = np.diff(np.append(col_idx, m))
    return sums / np.outer(row_counts, col_counts)


class ReselectRequest(BaseModel):
    method: str | None = None
    lam: float | None = Field(default=None, alias="lambda")
    mu: float | None = None
    r_window: int | None = None

    model_config = {"populate_by_name": True}


def _selection_payload(sel: SelectionConfig) -> dict:
    return {
        "method": sel.method,
        "lambda": sel.lam,
        "mu": sel.mu,
        "r_window": sel.r_window,
    }


def _metrics_payload(metrics: Metrics | None) -> dict | None:
    if metrics is None:
        return None
    return {
        "true_positives": metrics.true_positives,
        "false_positives": metrics.false_positives,
        "selected_count": metrics.selected_count,
        "eligible_count": metrics.eligible_count,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
    }


def _matches_payload(matches: MatchSet) -> list[dict]:
    return [
        {
            "query": p.query,
            "reference": p.reference,
            "score": p.score,
            "strength": p.strength,
            "uniqueness": p.uniqueness,
            "accepted": keep,
        }
        for p, keep in zip(matches.proposals, matches.accepted)
    ]


def _winning_trajectory(session: Session, r: int, q: int) -> list[dict]:
    """Cells of the best trajectory through (r, q) for trajectory/hybrid search."""
    cfg = session.config.search
    e = session.result.enhanced
    if cfg.method == "trajectory":
        candidates = velocity_grid(cfg)
    elif cfg.method == "hybrid":
        from .search import global_best_mask

        best = global_best_mask(session.result.diff)
        n, m = best.shape
        candidates = []
        for dr, dq in cone_offsets(cfg):
            rr, qq = r + dr, q + dq
            if 0 <= rr < n and 0 <= qq < m and best[rr, qq]:
                candidates.append(min(max(dr / dq, cfg.v_min), cfg.v_max))
    else:
        return []
    best_v, best_score = None, math.inf
    for v in candidates:
        score = trajectory_score(e, r, q, v, cfg.d_s)
        if score is not None and score < best_score:
            best_v, best_score = v, score
    if best_v is None:
        return []
    offs = np.arange(cfg.d_s) - cfg.d_s // 2
    from .numerics import round_half_away

    rows = round_half_away(r + best_v * offs).astype(int)
    cols = q + offs
    return [
        {"r": int(rr), "q": int(cc), "value": float(e.values[rr, cc])}
        for rr, cc in zip(rows, cols)
    ]


def _context_indices(center: int, context: int, length: int) -> list[int]:
    return [i for i in range(center - context, center + context + 1) if 0 <= i < length]


def _encode_png(img: np.ndarray) -> bytes:
    quantized = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(quantized, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def create_app(session: Session) -> FastAPI:
    app = FastAPI(title="seqslam explorer service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def on_api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.error, "detail": exc.detail}
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "invalid_request", "detail": str(exc)}
        )

    @app.exception_handler(Exception)
    async def on_server_error(_req: Request, exc: Exception):
        return JSONResponse(
            status_code=500, content={"error": "internal_error", "detail": str(exc)}
        )

    def check_session(token: str | None) -> None:
        if token is not None and token != session.id:
            raise ApiError(404, "unknown_session", f"no session {token!r}")

    @app.get("/api/session")
    def get_session(token: str | None = None):
        check_session(token)
        result = session.result
        return {
            "id": session.id,
            "n": result.scores.n,
            "m": result.scores.m,
            "reference_ids": list(result.ref.ids),
            "query_ids": list(result.query.ids),
            "orientation": result.scores.orientation,
            "search": {
                "method": session.config.search.method,
                "d_s": session.config.search.d_s,
                "v_min": session.config.search.v_min,
                "v_max": session.config.search.v_max,
                "v_step": session.config.search.v_step,
            },
            "selection": _selection_payload(session.selection),
            "metrics": _metrics_payload(session.metrics),
            "has_ground_truth": result.gt is not None,
            "methods_computed": sorted(session.scores_by_method),
        }

    @app.get("/api/matrix")
    def get_matrix(
        kind: str, method: str | None = None, downsample: int = 1, token: str | None = None
    ):
        check_session(token)
        if downsample < 1:
            raise ApiError(400, "invalid_request", "downsample must be >= 1")
        orientation = None
        valid = None
        if kind == "raw":
            values = session.result.diff.values
        elif kind == "enhanced":
            values = session.result.enhanced.values
        elif kind == "scores":
            method = method or session.config.search.method
            scores = session.scores_by_method.get(method)
            if scores is None:
                raise ApiError(
                    409,
                    "not_computed",
                    f"scores for method {method!r} were not computed in this session",
                )
            values = scores.scores
            orientation = scores.orientation
            valid = scores.valid
        else:
            raise ApiError(400, "invalid_request", f"unknown matrix kind {kind!r}")
        n, m = values.shape
        out_cells = math.ceil(n / downsample) * math.ceil(m / downsample)
        if out_cells > MAX_PAYLOAD_CELLS:
            raise ApiError(
                413,
                "payload_too_large",
                f"{out_cells} cells exceeds {MAX_PAYLOAD_CELLS}; raise the downsample factor",
            )
        block = block_mean(values, downsample)
        payload = {
            "kind": kind,
            "n": int(block.shape[0]),
            "m": int(block.shape[1]),
            "source_n": n,
            "source_m": m,
            "downsample": downsample,
            "values": block.reshape(-1).tolist(),
        }
        if orientation is not None:
            payload["orientation"] = orientation
            payload["method"] = method
        if valid is not None and downsample == 1:
            payload["valid"] = valid.reshape(-1).astype(int).tolist()
        return payload

    @app.post("/api/reselect")
    def reselect(body: ReselectRequest, token: str | None = None):
        check_session(token)
        with session.lock:
            current = session.selection
            try:
                sel = replace(
                    current,
                    method=body.method if body.method is not None else current.method,
                    lam=body.lam if body.lam is not None else current.lam,
                    mu=body.mu if body.mu is not None else current.mu,
                    r_window=body.r_window if body.r_window is not None else current.r_window,
                )
            except ValueError as err:
                raise ApiError(400, "invalid_selection", str(err)) from err
            matches = apply_selection(session.result.proposals, session.result.scores, sel)
            metrics = None
            if session.result.gt is not None:
                metrics = evaluate_matches(
                    matches, session.result.gt, session.config.evaluation.recall_denominator
                )
            session.current = SelectionSnapshot(
                selection=sel, matches=matches, metrics=metrics
            )
        return {
            "selection": _selection_payload(sel),
            "metrics": _metrics_payload(metrics),
            "accepted_count": sum(matches.accepted),
            "matches": _matches_payload(matches),
        }

    @app.get("/api/pr-curve")
    def get_pr_curve(method: str | None = None, token: str | None = None):
        check_session(token)
        if session.result.gt is None:
            raise ApiError(400, "no_ground_truth", "session was built without ground truth")
        sel = session.selection if method is None else replace(session.selection, method=method)
        try:
            curve = pr_curve(
                session.result.proposals,
                session.result.scores,
                session.result.gt,
                sel,
                session.config.evaluation.recall_denominator,
            )
        except ValueError as err:
            raise ApiError(400, "invalid_request", str(err)) from err
        return {
            "method": curve.method,
            "points": [
                {
                    "threshold": p.threshold,
                    "precision": p.precision,
                    "recall": p.recall,
                    "f1": p.f1,
                }
                for p in curve.points
            ],
        }

    @app.get("/api/match/{query}")
    def get_match_detail(query: int, context: int = 2, token: str | None = None):
        check_session(token)
        result = session.result
        m = result.scores.m
        if not 0 <= query < m:
            raise ApiError(404, "query_out_of_range", f"query {query} not in [0, {m})")
        proposal = None
        trajectory = []
        for p, keep in zip(session.matches.proposals, session.matches.accepted):
            if p.query == query:
                proposal = {
                    "query": p.query,
                    "reference": p.reference,
                    "score": p.score,
                    "strength": p.strength,
                    "uniqueness": p.uniqueness,
                    "accepted": keep,
                }
                trajectory = _winning_trajectory(session, p.reference, query)
                break
        reference_center = proposal["reference"] if proposal else None
        return {
            "query": query,
            "proposal": proposal,
            "trajectory": trajectory,
            "context": {
                "query_indices": _context_indices(query, context, m),
                "reference_indices": (
                    _context_indices(reference_center, context, result.scores.n)
                    if reference_center is not None
                    else []
                ),
            },
        }

    @app.get("/api/image")
    def get_image(traverse: str, index: int, token: str | None = None):
        check_session(token)
        if traverse == "reference":
            t: Traverse = session.result.ref_raw
        elif traverse == "query":
            t = session.result.query_raw
        else:
            raise ApiError(400, "invalid_request", f"traverse must be reference or query, got {traverse!r}")
        if not 0 <= index < len(t):
            raise ApiError(404, "index_out_of_range", f"index {index} not in [0, {len(t)})")
        return Response(content=_encode_png(t.images[index]), media_type="image/png")

    ui_dir = os.environ.get("SEQSLAM_UI", "frontend/dist")
    if Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
