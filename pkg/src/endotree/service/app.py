"""HTTP surface: one POST endpoint per pipeline under /api/v1."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import DomainError
from . import handlers, models as m


def create_app() -> FastAPI:
    app = FastAPI(
        title="endotree",
        description="Exact endoscopy and orbital-sum computations at rank-one scale",
        version="0.1.0",
    )

    def guarded(fn, request):
        try:
            return fn(request)
        except DomainError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/health", response_model=m.HealthResponse)
    def health():
        return handlers.handle_health()

    @app.post("/api/v1/endoscopy", response_model=m.EndoscopyResponse)
    def endoscopy(request: m.EndoscopyRequest):
        return guarded(handlers.handle_endoscopy, request)

    @app.post("/api/v1/h1", response_model=m.H1Response)
    def h1(request: m.H1Request):
        return guarded(handlers.handle_h1, request)

    @app.post("/api/v1/kappa", response_model=m.KappaResponse)
    def kappa(request: m.KappaRequest):
        return guarded(handlers.handle_kappa, request)

    @app.post("/api/v1/embed", response_model=m.EmbedResponse)
    def embed(request: m.EmbedRequest):
        return guarded(handlers.handle_embed, request)

    @app.post("/api/v1/jordan", response_model=m.JordanResponse)
    def jordan(request: m.JordanRequest):
        return guarded(handlers.handle_jordan, request)

    @app.post("/api/v1/conjugacy", response_model=m.ConjugacyResponse)
    def conjugacy(request: m.ConjugacyRequest):
        return guarded(handlers.handle_conjugacy, request)

    @app.post("/api/v1/count", response_model=m.CountResponse)
    def count(request: m.CountRequest):
        return guarded(handlers.handle_count, request)

    @app.post("/api/v1/fl", response_model=m.FlResponse)
    def fl(request: m.FlRequest):
        return guarded(handlers.handle_fl, request)

    @app.post("/api/v1/oracle", response_model=m.OracleResponse)
    def oracle(request: m.OracleRequest):
        return guarded(handlers.handle_oracle, request)

    return app


app = create_app()
