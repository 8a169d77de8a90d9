"""HTTP endpoints wrapping the library operations."""

from __future__ import annotations

import math

import numpy as np
from fastapi import APIRouter, HTTPException

from .. import __version__
from ..errors import (
    DegenerateDistributionError,
    NoiseRadarError,
    ParameterError,
    PerfectCorrelationError,
    QuadratureError,
    SeriesConvergenceError,
    SingularCovarianceError,
    ZeroSignalPowerError,
)
from ..distributions import (
    DistributionSpec,
    rice_approx_for_ddn,
    rice_approx_for_rho,
    total_variation_distance,
    von_mises_approx_for_phi,
)
from ..detection import DetectorScenario, build_roc_curve
from ..figures import figure_ids, generate_figure
from ..model import CovarianceParams, IQBatch, RadarVariant, stats_from_batch
from ..estimators import estimate
from ..simulator import SimConfig, run_trials, sample_batch, trial_rng
from . import schemas as s

router = APIRouter()

_ERROR_CODES = (
    (ZeroSignalPowerError, "zero-signal-power"),
    (PerfectCorrelationError, "perfect-correlation"),
    (SingularCovarianceError, "singular-covariance"),
    (DegenerateDistributionError, "degenerate-distribution"),
    (SeriesConvergenceError, "evaluation-failed"),
    (QuadratureError, "evaluation-failed"),
    (ParameterError, "invalid-parameters"),
    (NoiseRadarError, "invalid-parameters"),
    (OverflowError, "evaluation-failed"),
)


def _http_error(exc: Exception) -> HTTPException:
    for klass, code in _ERROR_CODES:
        if isinstance(exc, klass):
            return HTTPException(status_code=422,
                                 detail={"code": code, "message": str(exc)})
    raise exc


def _to_params(m: s.ModelParams) -> CovarianceParams:
    return CovarianceParams(m.sigma1, m.sigma2, m.rho, m.phi, RadarVariant(m.variant))


@router.get("/health", response_model=s.HealthResponse)
def health() -> s.HealthResponse:
    return s.HealthResponse(status="ok", version=__version__)


@router.post("/estimate", response_model=s.EstimateResponse)
def estimate_endpoint(req: s.EstimateRequest) -> s.EstimateResponse:
    try:
        batch = IQBatch(i1=np.asarray(req.i1), q1=np.asarray(req.q1),
                        i2=np.asarray(req.i2), q2=np.asarray(req.q2))
        stats = stats_from_batch(batch, RadarVariant(req.variant))
        est = estimate(stats)
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    return s.EstimateResponse(
        n=stats.n,
        variant=req.variant,
        estimates=s.EstimatesModel(
            sigma1_hat=est.sigma1_hat, sigma2_hat=est.sigma2_hat,
            rho_hat=est.rho_hat, phi_hat=est.phi_hat,
            rho_clamped=est.rho_clamped, phi_degenerate=est.phi_degenerate),
        sample_covariance=stats.s_hat.tolist(),
        p1_bar=stats.p1_bar, p2_bar=stats.p2_bar,
        rc_bar=stats.rc_bar, rs_bar=stats.rs_bar,
    )


@router.post("/simulate", response_model=s.SimulateResponse)
def simulate_endpoint(req: s.SimulateRequest) -> s.SimulateResponse:
    try:
        config = SimConfig(_to_params(req.params), req.n, req.trials, req.seed)
        results = run_trials(config)
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    cos_mean = float(np.mean(np.cos(results.phi_hat)))
    sin_mean = float(np.mean(np.sin(results.phi_hat)))
    finite_glr = results.glr[np.isfinite(results.glr)]
    summary = s.SimulateSummary(
        trials=req.trials, n=req.n, seed=req.seed,
        mean_sigma1_hat=float(results.sigma1_hat.mean()),
        std_sigma1_hat=float(results.sigma1_hat.std()),
        mean_sigma2_hat=float(results.sigma2_hat.mean()),
        std_sigma2_hat=float(results.sigma2_hat.std()),
        mean_rho_hat=float(results.rho_hat.mean()),
        std_rho_hat=float(results.rho_hat.std()),
        circular_mean_phi_hat=math.atan2(sin_mean, cos_mean),
        mean_resultant_phi_hat=math.hypot(cos_mean, sin_mean),
        mean_ddn=float(results.ddn.mean()),
        mean_glr=float(finite_glr.mean()) if finite_glr.size else math.inf,
        rho_clamped_count=int(results.rho_clamped.sum()),
        phi_degenerate_count=int(results.phi_degenerate.sum()),
    )
    columns = None
    if req.include_trials:
        columns = s.TrialColumns(
            sigma1_hat=results.sigma1_hat.tolist(),
            sigma2_hat=results.sigma2_hat.tolist(),
            rho_hat=results.rho_hat.tolist(),
            phi_hat=results.phi_hat.tolist(),
            rho_clamped=results.rho_clamped.tolist(),
            phi_degenerate=results.phi_degenerate.tolist(),
            ddn=results.ddn.tolist(),
            glr=[float(g) for g in results.glr],
        )
    return s.SimulateResponse(params=req.params, summary=summary, columns=columns)


@router.post("/simulate/iq", response_model=s.IQResponse)
def simulate_iq_endpoint(req: s.IQRequest) -> s.IQResponse:
    try:
        batch = sample_batch(_to_params(req.params), req.n, trial_rng(req.seed, req.trial))
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    return s.IQResponse(n=batch.n, i1=batch.i1.tolist(), q1=batch.q1.tolist(),
                        i2=batch.i2.tolist(), q2=batch.q2.tolist())


def _grid_points(req: s.PdfRequest) -> np.ndarray:
    if req.points is not None:
        return np.asarray(req.points, dtype=float)
    g = req.grid
    if g.spacing == "log":
        if g.lo <= 0 or g.hi <= g.lo:
            raise ParameterError("log spacing requires 0 < lo < hi")
        return np.logspace(math.log10(g.lo), math.log10(g.hi), g.count)
    if g.hi <= g.lo:
        raise ParameterError("grid requires lo < hi")
    return np.linspace(g.lo, g.hi, g.count)


@router.post("/pdf", response_model=s.PdfResponse)
def pdf_endpoint(req: s.PdfRequest) -> s.PdfResponse:
    try:
        spec = DistributionSpec(req.family, req.params)
        xs = _grid_points(req)
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    points = []
    for x in xs:
        try:
            points.append(s.CurvePoint(x=float(x), density=spec.pdf(float(x))))
        except (SeriesConvergenceError, QuadratureError, OverflowError) as exc:
            points.append(s.CurvePoint(x=float(x), density=None, status=f"failed:{exc}"))
    return s.PdfResponse(family=req.family, params=dict(spec.params), points=points)


@router.post("/roc", response_model=s.RocResponse)
def roc_endpoint(req: s.RocRequest) -> s.RocResponse:
    try:
        scenario = DetectorScenario(rho=req.params.rho, n=req.params.n,
                                    sigma1=req.params.sigma1, sigma2=req.params.sigma2,
                                    variant=RadarVariant(req.params.variant))
        curve = build_roc_curve(req.detector, req.method, scenario,
                                pfa_grid=req.pfa_grid, trials=req.trials, seed=req.seed)
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    points = [s.RocPointModel(pfa=pfa, pd=pd, threshold=thr, status=status)
              for pfa, pd, thr, status in curve.rows()]
    return s.RocResponse(detector=req.detector, method=req.method, params=req.params,
                         note=curve.note, points=points)


@router.post("/tvd", response_model=s.TvdResponse)
def tvd_endpoint(req: s.TvdRequest) -> s.TvdResponse:
    try:
        f = DistributionSpec(req.f.family, req.f.params)
        g = DistributionSpec(req.g.family, req.g.params)
        domain = (req.lo, req.hi) if req.lo is not None else None
        value = total_variation_distance(f, g, domain=domain)
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    return s.TvdResponse(tvd=value)


def _sweep_pair(req: s.TvdSweepRequest, value: float):
    if req.sweep_param == "n":
        rho, n = float(req.rho), int(value)
    else:
        rho, n = float(value), int(req.n)
    if req.pair == "rho-rice":
        rice = rice_approx_for_rho(rho, n)
        return (DistributionSpec("rho-exact", {"rho": rho, "n": n}),
                DistributionSpec("rice", {"alpha": rice.alpha, "beta": rice.beta}))
    if req.pair == "phi-vonmises":
        vm = von_mises_approx_for_phi(rho, req.phi, n)
        return (DistributionSpec("phi-exact", {"rho": rho, "phi": req.phi, "n": n}),
                DistributionSpec("von-mises", {"mu": vm.mu, "kappa": vm.kappa}))
    rice = rice_approx_for_ddn(req.sigma1, req.sigma2, rho, n)
    return (DistributionSpec("ddn-exact", {"sigma1": req.sigma1, "sigma2": req.sigma2,
                                           "rho": rho, "n": n}),
            DistributionSpec("rice", {"alpha": rice.alpha, "beta": rice.beta}))


@router.post("/tvd/sweep", response_model=s.TvdSweepResponse)
def tvd_sweep_endpoint(req: s.TvdSweepRequest) -> s.TvdSweepResponse:
    rows = []
    for value in req.sweep_values:
        try:
            f, g = _sweep_pair(req, value)
            rows.append(s.SweepRow(value=value, tvd=total_variation_distance(f, g)))
        except NoiseRadarError as exc:
            rows.append(s.SweepRow(value=value, tvd=None, status=f"failed:{exc}"))
    return s.TvdSweepResponse(pair=req.pair, sweep_param=req.sweep_param, rows=rows)


@router.get("/figures", response_model=s.FigureListResponse)
def figures_list_endpoint() -> s.FigureListResponse:
    return s.FigureListResponse(figures=list(figure_ids()))


@router.post("/figures/{figure_id}", response_model=s.FigureResponse)
def figures_endpoint(figure_id: str) -> s.FigureResponse:
    try:
        curves = generate_figure(figure_id)
    except NoiseRadarError as exc:
        raise _http_error(exc) from exc
    return s.FigureResponse(
        figure=figure_id,
        curves=[
            s.FigureCurveModel(name=c.name, params=c.params, columns=list(c.columns),
                               rows=[list(r) for r in c.rows], status=c.status,
                               failed_points=c.failed_points)
            for c in curves
        ],
    )
