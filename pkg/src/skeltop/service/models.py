"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

SkelMethod = Literal["soft", "euler", "boolean"]


class BettiModel(BaseModel):
    b0: int
    b1: int
    b2: int
    chi: int


class HealthResponse(BaseModel):
    status: str
    version: str


class PhantomRequest(BaseModel):
    spec: str = Field(description="key=value spec, e.g. 'kind=torus radius=2 dims=64,64,64'")
    out_path: str


class PhantomResponse(BaseModel):
    path: str
    expected: BettiModel
    foreground: int


class SkeletonizeRequest(BaseModel):
    in_path: str
    out_path: Optional[str] = None
    method: SkelMethod = "euler"
    iterations: int = Field(default=10, ge=1, description="soft method only")
    preserve_endpoints: bool = True
    threads: int = Field(default=1, ge=1)


class SkeletonizeResponse(BaseModel):
    runtime_ms: float
    input_betti: BettiModel
    output_betti: BettiModel
    out_path: Optional[str] = None


class MetricsRequest(BaseModel):
    pred_path: str
    gt_path: str
    skel_method: SkelMethod = "euler"
    min_component: int = Field(default=100, ge=0,
                               description="0 disables post-processing")
    soft_iterations: int = Field(default=10, ge=1)


class MetricsResponse(BaseModel):
    dice: float
    cl_dice: float
    t_prec: float
    t_sens: float
    b0_err: int
    b1_err: int
    chi_err: int
    runtime_ms: Optional[float] = None


class BenchRequest(BaseModel):
    methods: list[SkelMethod] = ["soft", "euler", "boolean"]
    patch_dims: tuple[int, int, int] = (192, 192, 64)
    repeats: int = Field(default=5, ge=1)
    seed: int = 0
    soft_iterations: int = Field(default=10, ge=1)
    radius: int = Field(default=3, ge=1)
    n_branches: int = Field(default=10, ge=1)
    inputs: list[str] = []
    threads: int = Field(default=1, ge=1)


class BenchMethodSummary(BaseModel):
    method: str
    runtime_ms_mean: float
    runtime_ms_std: float
    runtime_ms_median: float
    chi_err_mean: float
    chi_err_std: float
    b0_err_mean: float
    b0_err_std: float
    b1_err_mean: float
    b1_err_std: float


class BenchResponse(BaseModel):
    summaries: list[BenchMethodSummary]
    table: str
    csv: str
