"""FastAPI application factory for the noise-radar statistics service."""

from __future__ import annotations

from fastapi import FastAPI

from .. import __version__


def create_app() -> FastAPI:
    from .routes import router

    app = FastAPI(
        title="noiseradar",
        version=__version__,
        description=(
            "Covariance-matrix statistics for noise-type radars: parameter "
            "estimation, exact and approximate estimator distributions, "
            "detector ROC curves, and Monte Carlo simulation."
        ),
    )
    app.include_router(router)
    return app
