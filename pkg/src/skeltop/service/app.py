"""FastAPI service wrapping the core library.

Endpoints operate on server-local volume paths; payload volumes are far too
large for JSON bodies, and the CLI runs the app in-process by default, so
paths resolve on the same filesystem either way.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, HTTPException

from .. import __version__, volio
from ..bench import BenchConfig, format_csv, format_table, run_bench
from ..metrics import evaluate, extract_centerline
from ..phantom import PhantomError, PhantomSpec, generate
from ..grid import count_foreground
from ..topology import BettiTriple, betti_numbers
from .models import (BenchMethodSummary, BenchRequest, BenchResponse,
                     BettiModel, HealthResponse, MetricsRequest,
                     MetricsResponse, PhantomRequest, PhantomResponse,
                     SkeletonizeRequest, SkeletonizeResponse)


def _betti_model(b: BettiTriple) -> BettiModel:
    return BettiModel(b0=b.b0, b1=b.b1, b2=b.b2, chi=b.chi)


def _load(path):
    try:
        return volio.load_any(path, binary=True)
    except (OSError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"cannot read {path}: {exc}")


def create_app() -> FastAPI:
    app = FastAPI(title="skeltop", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/phantom", response_model=PhantomResponse)
    def phantom(req: PhantomRequest):
        try:
            spec = PhantomSpec.parse(req.spec)
            vol, expected = generate(spec)
        except PhantomError as exc:
            raise HTTPException(status_code=400,
                                detail=f"unconstructible phantom: {exc}")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=f"bad spec: {exc}")
        try:
            volio.write_volume(vol, req.out_path)
        except OSError as exc:
            raise HTTPException(status_code=400,
                                detail=f"cannot write {req.out_path}: {exc}")
        return PhantomResponse(path=req.out_path,
                               expected=_betti_model(expected),
                               foreground=count_foreground(vol))

    @app.post("/skeletonize", response_model=SkeletonizeResponse)
    def skeletonize_endpoint(req: SkeletonizeRequest):
        vol = _load(req.in_path)
        t0 = time.perf_counter()
        skel = extract_centerline(vol, req.method,
                                  soft_iterations=req.iterations,
                                  threads=req.threads,
                                  preserve_endpoints=req.preserve_endpoints)
        runtime_ms = (time.perf_counter() - t0) * 1000.0
        if req.out_path:
            try:
                volio.write_volume(skel, req.out_path)
            except OSError as exc:
                raise HTTPException(status_code=400,
                                    detail=f"cannot write {req.out_path}: {exc}")
        return SkeletonizeResponse(runtime_ms=runtime_ms,
                                   input_betti=_betti_model(betti_numbers(vol)),
                                   output_betti=_betti_model(betti_numbers(skel)),
                                   out_path=req.out_path)

    @app.post("/metrics", response_model=MetricsResponse)
    def metrics_endpoint(req: MetricsRequest):
        pred = _load(req.pred_path)
        gt = _load(req.gt_path)
        try:
            report = evaluate(pred, gt, skel_method=req.skel_method,
                              postprocess=req.min_component > 0,
                              min_voxels=max(req.min_component, 1),
                              soft_iterations=req.soft_iterations)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return MetricsResponse(**report.to_dict())

    @app.post("/bench", response_model=BenchResponse)
    def bench_endpoint(req: BenchRequest):
        try:
            cfg = BenchConfig(patch_dims=tuple(req.patch_dims),
                              repeats=req.repeats,
                              methods=tuple(req.methods),
                              seed=req.seed,
                              soft_iterations=req.soft_iterations,
                              radius=req.radius,
                              n_branches=req.n_branches,
                              inputs=tuple(req.inputs),
                              threads=req.threads)
            rows = run_bench(cfg)
        except (OSError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return BenchResponse(
            summaries=[BenchMethodSummary(**row.summary()) for row in rows],
            table=format_table(rows),
            csv=format_csv(rows))

    return app
