"""API routes for the deconvolution service.

Handlers are async and push the numerical work to the threadpool.
"""

import logging

from fastapi import APIRouter
from starlette.concurrency import run_in_threadpool

from core.config import build_search_config
from core.model_sim import preset_model, series_from_parts, simulate_model
from core.pipeline import run_estimate
from services.deconv_service.schemas import (
    EstimateRequest,
    EstimateResponse,
    HTTPError,
    Series,
    SimulateRequest,
)

logger = logging.getLogger(__name__)

router = APIRouter(tags=["deconvolution"])


@router.post("/simulate", response_model=Series, responses={422: {"model": HTTPError}})
async def simulate(data: SimulateRequest) -> Series:
    """Simulate observations from a preset model."""
    y = await run_in_threadpool(
        lambda: simulate_model(preset_model(data.preset, data.sigma0, data.n, data.seed))
    )
    return Series(re=y.samples.real.tolist(), im=y.samples.imag.tolist(), origin=y.origin)


@router.post("/estimate", response_model=EstimateResponse, responses={422: {"model": HTTPError}})
async def estimate(data: EstimateRequest) -> EstimateResponse:
    """Estimate noise level, inverse filter, alphabet and weights from observations."""
    y = series_from_parts(data.re, data.im, origin=data.origin)
    search = build_search_config(**data.search.model_dump())
    report = await run_in_threadpool(run_estimate, y, data.p, data.kn, search, data.with_cov)
    logger.info("Estimated sigma=%.6g from %d observations", report.result.sigma_hat, len(y))
    return EstimateResponse(**report.to_dict())
