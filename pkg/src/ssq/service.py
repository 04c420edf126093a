"""HTTP service exposing state detection and verification suites.

The CLI talks to this app (in-process by default, remote via --server); the
request/response models double as the wire schema for both.
"""

from __future__ import annotations

import time
from typing import Any, Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

from . import __version__, detect, search
from .errors import (
    ParameterError,
    RepresentationError,
    ResourceLimitError,
    StateFormatError,
)
from .states import state_from_dict


class StateModel(BaseModel):
    n_qubits: int = Field(ge=1)
    kind: Literal["pure", "density", "dicke"]
    data: Any

    def to_state(self):
        return state_from_dict(self.model_dump())


class SearchOptions(BaseModel):
    seed: int = 0
    coarse_grid: int = Field(default=24, ge=1)
    restarts: int = Field(default=32, ge=1)
    rapidity_cap: float = Field(default=5.0, gt=0, le=20.0)
    refine_iters: int = Field(default=200, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)

    def to_config(self) -> search.SearchConfig:
        return search.SearchConfig(**self.model_dump())


class DetectRequest(BaseModel):
    state: StateModel
    criteria: list[str] = Field(min_length=1)
    options: SearchOptions = SearchOptions()

    @field_validator("criteria")
    @classmethod
    def _known_criteria(cls, value):
        unknown = [c for c in value if c not in detect.CRITERION_IDS]
        if unknown:
            raise ValueError(
                f"unknown criteria {unknown}; valid: {', '.join(detect.CRITERION_IDS)}"
            )
        return value


class CriterionResult(BaseModel):
    criterion: str
    margin: float | None
    verdict: str
    params: dict
    xi_squared: float | None = None
    note: str | None = None


class ReportModel(BaseModel):
    tool_version: str
    input_digest: str
    n_qubits: int
    symmetric: bool
    seed: int
    criteria: list[CriterionResult]
    oracle: dict | None
    wall_time_s: float | None = None


class DetectResponse(BaseModel):
    report: ReportModel
    wall_time_s: float


class VerifyRequest(BaseModel):
    suite: str
    samples: int | None = Field(default=None, ge=0)
    seed: int = 0

    @field_validator("suite")
    @classmethod
    def _known_suite(cls, value):
        if value not in detect.SUITE_IDS:
            raise ValueError(f"unknown suite {value!r}; valid: {', '.join(detect.SUITE_IDS)}")
        return value


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    summary: dict
    wall_time_s: float


app = FastAPI(title="ssq", version=__version__)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/detect", response_model=DetectResponse)
def detect_endpoint(request: DetectRequest) -> DetectResponse:
    t0 = time.monotonic()
    try:
        state = request.state.to_state()
        report = detect.run_detect(state, request.criteria, request.options.to_config())
    except (StateFormatError, RepresentationError, ParameterError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except ResourceLimitError as exc:
        raise HTTPException(status_code=413, detail=str(exc)) from exc
    elapsed = time.monotonic() - t0
    return DetectResponse(report=ReportModel(**report.to_dict()), wall_time_s=elapsed)


@app.post("/verify", response_model=VerifyResponse)
def verify_endpoint(request: VerifyRequest) -> VerifyResponse:
    t0 = time.monotonic()
    try:
        passed, summary = detect.run_verify(request.suite, request.samples, request.seed)
    except ParameterError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except ResourceLimitError as exc:
        raise HTTPException(status_code=413, detail=str(exc)) from exc
    return VerifyResponse(
        suite=request.suite, passed=passed, summary=summary, wall_time_s=time.monotonic() - t0
    )
