"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

Variant = Literal["qtms", "noise"]
Family = Literal["sigma-exact", "rho-exact", "phi-exact", "ddn-exact",
                 "rice", "von-mises", "rayleigh"]


class ModelParams(BaseModel):
    sigma1: float = Field(1.0, ge=0)
    sigma2: float = Field(1.0, ge=0)
    rho: float = Field(0.0, ge=0, le=1)
    phi: float = 0.0
    variant: Variant = "qtms"


class ErrorDetail(BaseModel):
    code: str
    message: str


# -- /estimate --------------------------------------------------------------

class EstimateRequest(BaseModel):
    i1: list[float]
    q1: list[float]
    i2: list[float]
    q2: list[float]
    variant: Variant = "qtms"


class EstimatesModel(BaseModel):
    sigma1_hat: float
    sigma2_hat: float
    rho_hat: float
    phi_hat: float
    rho_clamped: bool
    phi_degenerate: bool


class EstimateResponse(BaseModel):
    n: int
    variant: Variant
    estimates: EstimatesModel
    sample_covariance: list[list[float]]
    p1_bar: float
    p2_bar: float
    rc_bar: float
    rs_bar: float


# -- /simulate --------------------------------------------------------------

class SimulateRequest(BaseModel):
    params: ModelParams = ModelParams()
    n: int = Field(ge=1)
    trials: int = Field(1, ge=1, le=10_000_000)
    seed: int = Field(0, ge=0, lt=2**64)
    include_trials: bool = False


class SimulateSummary(BaseModel):
    trials: int
    n: int
    seed: int
    mean_sigma1_hat: float
    std_sigma1_hat: float
    mean_sigma2_hat: float
    std_sigma2_hat: float
    mean_rho_hat: float
    std_rho_hat: float
    circular_mean_phi_hat: float
    mean_resultant_phi_hat: float
    mean_ddn: float
    mean_glr: float
    rho_clamped_count: int
    phi_degenerate_count: int


class TrialColumns(BaseModel):
    sigma1_hat: list[float]
    sigma2_hat: list[float]
    rho_hat: list[float]
    phi_hat: list[float]
    rho_clamped: list[bool]
    phi_degenerate: list[bool]
    ddn: list[float]
    glr: list[float]


class SimulateResponse(BaseModel):
    params: ModelParams
    summary: SimulateSummary
    columns: TrialColumns | None = None


class IQRequest(BaseModel):
    params: ModelParams = ModelParams()
    n: int = Field(ge=1, le=50_000_000)
    seed: int = Field(0, ge=0, lt=2**64)
    trial: int = Field(0, ge=0)


class IQResponse(BaseModel):
    n: int
    i1: list[float]
    q1: list[float]
    i2: list[float]
    q2: list[float]


# -- /pdf -------------------------------------------------------------------

class GridModel(BaseModel):
    lo: float
    hi: float
    count: int = Field(ge=2, le=1_000_000)
    spacing: Literal["linear", "log"] = "linear"


class PdfRequest(BaseModel):
    family: Family
    params: dict[str, float]
    grid: GridModel | None = None
    points: list[float] | None = None

    @model_validator(mode="after")
    def _exactly_one_grid(self):
        if (self.grid is None) == (self.points is None):
            raise ValueError("provide exactly one of 'grid' or 'points'")
        return self


class CurvePoint(BaseModel):
    x: float
    density: float | None = None
    status: str = "ok"


class PdfResponse(BaseModel):
    family: Family
    params: dict[str, float]
    points: list[CurvePoint]


# -- /roc -------------------------------------------------------------------

class RocParams(BaseModel):
    rho: float = Field(ge=0, lt=1)
    n: int = Field(ge=1)
    sigma1: float = Field(1.0, gt=0)
    sigma2: float = Field(1.0, gt=0)
    variant: Variant = "qtms"


class RocRequest(BaseModel):
    detector: Literal["rho-hat", "ddn"]
    method: Literal["exact", "closed-form", "monte-carlo"]
    params: RocParams
    pfa_grid: list[float] | None = None
    trials: int = Field(10_000, ge=1, le=10_000_000)
    seed: int = Field(0, ge=0, lt=2**64)


class RocPointModel(BaseModel):
    pfa: float
    pd: float | None = None
    threshold: float | None = None
    status: str = "ok"


class RocResponse(BaseModel):
    detector: str
    method: str
    params: RocParams
    note: str | None = None
    points: list[RocPointModel]


# -- /tvd -------------------------------------------------------------------

class SpecModel(BaseModel):
    family: Family
    params: dict[str, float]


class TvdRequest(BaseModel):
    f: SpecModel
    g: SpecModel
    lo: float | None = None
    hi: float | None = None

    @model_validator(mode="after")
    def _domain_pairs(self):
        if (self.lo is None) != (self.hi is None):
            raise ValueError("provide both 'lo' and 'hi' or neither")
        return self


class TvdResponse(BaseModel):
    tvd: float


class TvdSweepRequest(BaseModel):
    pair: Literal["rho-rice", "phi-vonmises", "ddn-rice"]
    sweep_param: Literal["n", "rho"]
    sweep_values: list[float] = Field(min_length=1, max_length=10_000)
    rho: float | None = Field(None, ge=0, lt=1)
    n: int | None = Field(None, ge=1)
    phi: float = 0.0
    sigma1: float = Field(1.0, gt=0)
    sigma2: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _fixed_param_present(self):
        if self.sweep_param == "n" and self.rho is None:
            raise ValueError("sweeping over n requires a fixed 'rho'")
        if self.sweep_param == "rho" and self.n is None:
            raise ValueError("sweeping over rho requires a fixed 'n'")
        return self


class SweepRow(BaseModel):
    value: float
    tvd: float | None = None
    status: str = "ok"


class TvdSweepResponse(BaseModel):
    pair: str
    sweep_param: str
    rows: list[SweepRow]


# -- /figures ---------------------------------------------------------------

class FigureCurveModel(BaseModel):
    name: str
    params: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    status: str
    failed_points: int


class FigureResponse(BaseModel):
    figure: str
    curves: list[FigureCurveModel]


class FigureListResponse(BaseModel):
    figures: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
