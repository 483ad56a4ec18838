"""FastAPI application exposing the pipeline over HTTP.

Domain errors map to 400 (the request was well-formed but physically or
statistically invalid), numerical failures to 500; body validation is
FastAPI's usual 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import InputDomainError, NumericalFailure
from . import api
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(
        title="spdclab",
        version=__version__,
        description=(
            "Two-crystal downconversion source simulator: delay budgets, "
            "visibility and CHSH curves, synthetic coincidence counts, "
            "maximum-likelihood state reconstruction and fringe envelopes."
        ),
    )

    @app.exception_handler(InputDomainError)
    async def _domain_error(request: Request, exc: InputDomainError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(NumericalFailure)
    async def _numerical_error(request: Request, exc: NumericalFailure):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health", response_model=sc.HealthResponse)
    def health() -> sc.HealthResponse:
        return api.health()

    @app.get("/projectors", response_model=sc.ProjectorSetResponse)
    def projectors() -> sc.ProjectorSetResponse:
        return api.projector_set()

    @app.post("/source-report", response_model=sc.SourceReportResponse)
    def source_report(req: sc.SourceReportRequest) -> sc.SourceReportResponse:
        return api.source_report(req)

    @app.post("/visibility-scan", response_model=sc.VisibilityScanResponse)
    def visibility_scan(req: sc.VisibilityScanRequest) -> sc.VisibilityScanResponse:
        return api.visibility_scan(req)

    @app.post("/bell", response_model=sc.BellResponse)
    def bell(req: sc.BellRequest) -> sc.BellResponse:
        return api.bell(req)

    @app.post("/tomography", response_model=sc.TomographyResponse)
    def tomography(req: sc.TomographyRequest) -> sc.TomographyResponse:
        return api.tomography(req)

    @app.post("/interference", response_model=sc.InterferenceResponse)
    def interference(req: sc.InterferenceRequest) -> sc.InterferenceResponse:
        return api.interference(req)

    @app.post("/simulate-counts", response_model=sc.SimulateCountsResponse)
    def simulate_counts(req: sc.SimulateCountsRequest) -> sc.SimulateCountsResponse:
        return api.simulate_counts_cmd(req)

    return app


app = create_app()
