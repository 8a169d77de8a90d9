"""Numeric regeneration of every figure's underlying data.

Each figure id maps to a deterministic set of named curves.  Curves carry
tabular rows whose last column is a status; a point that cannot be
evaluated is recorded as failed rather than aborting the curve.

    fig1   density of sigma1_hat; sigma1 = 1, N in {25, 100, 250}
    fig2   TVD of rho_hat exact vs Rice, over N; rho in {0.3, 0.6, 0.9}
    fig3   density of rho_hat + Rice approx; (a) N = 10, rho in {0, 0.4, 0.8};
           (b) rho = 0.1, N in {25, 50, 75, 100}
    fig4   von Mises concentration fitted to phi_hat, against N rho^2,
           with the square-root / linear approximation rules
    fig5   TVD of phi_hat exact vs von Mises, over N; rho in {0.05, 0.1, 0.15, 0.2}
    fig6   density of phi_hat + von Mises approx; (a) N = 10, rho in {0, 0.2, 0.4};
           (b) rho = 0.1, N in {25, 50, 250}; phi = 0
    fig7   ROC of rho_hat, exact + closed form; (a) N = 10, rho in
           {0.2, 0.4, 0.6, 0.8}; (b) rho = 0.2, N in {10, 50, 100, 200}
    fig8   density of D_DN (normalized x_tilde) + Rice approx; (a) N = 10,
           rho in {0, 0.3, 0.6}; (b) rho = 0.1, N in {25, 50, 75, 100}
    fig9   TVD of D_DN exact vs Rice, over N; rho in {0.2, 0.4, 0.6}
    fig10  ROC of D_DN, exact + closed form; same grids as fig7
    fig11  exact ROC comparison of both detectors; N = 10, rho in {0.2, 0.5, 0.8}

Panel ids (fig3a, fig7b, ...) select half of a two-panel figure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    NoiseRadarError,
    ParameterError,
    QuadratureError,
    SeriesConvergenceError,
)
from . import distributions as dist
from .detection import DetectorScenario, build_roc_curve
from .specfun import QuadratureSpec

__all__ = ["FigureCurve", "figure_ids", "generate_figure"]

# Figure-grade quadrature: 1e-5 relative accuracy is far below anything
# visible in a plotted curve and keeps TVD sweeps fast.
_FIGURE_QUAD = QuadratureSpec(abs_tol=1e-7, rel_tol=1e-5, max_subdivisions=10**6)

_TVD_N_GRID = (10, 25, 50, 75, 100, 125, 150, 175, 200, 250)
_TVD_PHI_N_GRID = (10, 25, 44, 70, 100, 150, 200, 300, 400, 500)

_POINT_ERRORS = (SeriesConvergenceError, QuadratureError, OverflowError)


@dataclass(frozen=True)
class FigureCurve:
    """One named curve of a figure: tabular rows plus a status summary."""

    name: str
    params: dict
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    status: str
    failed_points: int


def _tag(value: float) -> str:
    """Encode a parameter value for a curve name: 0.3 -> '0p30'."""
    return f"{value:.2f}".replace(".", "p")


def _curve_from_points(name: str, params: dict, columns, xs,
                       evaluate: Callable[[float], float]) -> FigureCurve:
    rows = []
    failed = 0
    for x in xs:
        try:
            rows.append((float(x), evaluate(float(x)), "ok"))
        except _POINT_ERRORS as exc:
            rows.append((float(x), None, f"failed:{exc}"))
            failed += 1
    if failed == 0:
        status = "ok"
    elif failed == len(rows):
        status = "failed"
    else:
        status = "partial"
    return FigureCurve(name=name, params=params, columns=tuple(columns),
                       rows=tuple(rows), status=status, failed_points=failed)


def _roc_figure_curve(name: str, detector: str, method: str, rho: float, n: int) -> FigureCurve:
    curve = build_roc_curve(detector, method, DetectorScenario(rho=rho, n=n))
    rows = tuple(curve.rows())
    failed = len(curve.failures)
    status = "ok" if failed == 0 else ("failed" if not curve.points else "partial")
    params = {"detector": detector, "method": method, "rho": rho, "n": n,
              "sigma1": 1.0, "sigma2": 1.0}
    if curve.note:
        params["note"] = curve.note
    return FigureCurve(name=name, params=params,
                       columns=("pfa", "pd", "threshold", "status"),
                       rows=rows, status=status, failed_points=failed)


# ---------------------------------------------------------------------------
# Individual figure builders


def _fig1() -> list[FigureCurve]:
    xs = np.linspace(0.0, 2.0, 401)
    return [
        _curve_from_points(f"n{n}", {"sigma1": 1.0, "n": n}, ("x", "density", "status"),
                           xs, lambda x, n=n: dist.pdf_sigma_hat(x, 1.0, n))
        for n in (25, 100, 250)
    ]


def _tvd_sweep_curve(name: str, params: dict, n_grid,
                     pair: Callable[[int], tuple[dist.DistributionSpec, dist.DistributionSpec]]
                     ) -> FigureCurve:
    def evaluate(n: float) -> float:
        f, g = pair(int(n))
        return dist.total_variation_distance(f, g, spec=_FIGURE_QUAD)

    return _curve_from_points(name, params, ("n", "tvd", "status"), n_grid, evaluate)


def _fig2() -> list[FigureCurve]:
    def pair_for(rho: float):
        def pair(n: int):
            rice = dist.rice_approx_for_rho(rho, n)
            return (dist.DistributionSpec("rho-exact", {"rho": rho, "n": n}),
                    dist.DistributionSpec("rice", {"alpha": rice.alpha, "beta": rice.beta}))
        return pair

    return [
        _tvd_sweep_curve(f"rho{_tag(rho)}", {"rho": rho, "n_grid": list(_TVD_N_GRID)},
                         _TVD_N_GRID, pair_for(rho))
        for rho in (0.3, 0.6, 0.9)
    ]


def _fig3_panel(panel: str) -> list[FigureCurve]:
    xs = np.linspace(0.0, 1.0, 401)
    combos = ([(rho, 10, f"rho{_tag(rho)}") for rho in (0.0, 0.4, 0.8)] if panel == "a"
              else [(0.1, n, f"n{n}") for n in (25, 50, 75, 100)])
    curves = []
    for rho, n, suffix in combos:
        curves.append(_curve_from_points(
            f"exact_{suffix}", {"rho": rho, "n": n}, ("x", "density", "status"),
            xs, lambda x, rho=rho, n=n: dist.pdf_rho_hat_exact(x, rho, n)))
        rice = dist.rice_approx_for_rho(rho, n)
        curves.append(_curve_from_points(
            f"rice_{suffix}", {"rho": rho, "n": n, "alpha": rice.alpha, "beta": rice.beta},
            ("x", "density", "status"),
            xs, lambda x, p=rice: dist.pdf_rice(x, p)))
    return curves


def _fig4() -> list[FigureCurve]:
    ks = np.logspace(-2, 2, 21)
    curves = []
    for n in (100, 400):
        grid = [k for k in ks if k < 0.95**2 * n]  # needs rho = sqrt(K/N) < 1

        def evaluate(k: float, n: int = n) -> float:
            rho = math.sqrt(k / n)
            r = dist.mean_resultant_length(rho, 0.0, n, spec=_FIGURE_QUAD)
            return dist.kappa_from_resultant_length(r)

        curves.append(_curve_from_points(
            f"pipeline_n{n}", {"n": n, "phi": 0.0}, ("n_rho_sq", "kappa", "status"),
            grid, evaluate))
    curves.append(_curve_from_points(
        "rule_sqrt", {"rule": "2*sqrt(N rho^2)"}, ("n_rho_sq", "kappa", "status"),
        ks, lambda k: 2.0 * math.sqrt(k)))
    curves.append(_curve_from_points(
        "rule_linear", {"rule": "2*N rho^2"}, ("n_rho_sq", "kappa", "status"),
        ks, lambda k: 2.0 * k))
    return curves


def _fig5() -> list[FigureCurve]:
    def pair_for(rho: float):
        def pair(n: int):
            vm = dist.von_mises_approx_for_phi(rho, 0.0, n)
            return (dist.DistributionSpec("phi-exact", {"rho": rho, "phi": 0.0, "n": n}),
                    dist.DistributionSpec("von-mises", {"mu": vm.mu, "kappa": vm.kappa}))
        return pair

    return [
        _tvd_sweep_curve(f"rho{_tag(rho)}", {"rho": rho, "phi": 0.0,
                                             "n_grid": list(_TVD_PHI_N_GRID)},
                         _TVD_PHI_N_GRID, pair_for(rho))
        for rho in (0.05, 0.10, 0.15, 0.20)
    ]


def _fig6_panel(panel: str) -> list[FigureCurve]:
    thetas = np.linspace(-math.pi, math.pi, 361)
    combos = ([(rho, 10, f"rho{_tag(rho)}") for rho in (0.0, 0.2, 0.4)] if panel == "a"
              else [(0.1, n, f"n{n}") for n in (25, 50, 250)])
    curves = []
    for rho, n, suffix in combos:
        curves.append(_curve_from_points(
            f"exact_{suffix}", {"rho": rho, "phi": 0.0, "n": n},
            ("theta", "density", "status"),
            thetas, lambda t, rho=rho, n=n: dist.pdf_phi_hat_exact(t, rho, 0.0, n)))
        if rho == 0.0:
            # The von Mises fit degenerates to the uniform circle at rho = 0.
            curves.append(_curve_from_points(
                f"vm_{suffix}", {"rho": rho, "n": n, "kappa": 0.0, "mu": 0.0},
                ("theta", "density", "status"),
                thetas, lambda t: 1.0 / (2.0 * math.pi)))
        else:
            vm = dist.von_mises_approx_for_phi(rho, 0.0, n)
            curves.append(_curve_from_points(
                f"vm_{suffix}", {"rho": rho, "n": n, "kappa": vm.kappa, "mu": vm.mu},
                ("theta", "density", "status"),
                thetas, lambda t, p=vm: dist.pdf_von_mises(t, p)))
    return curves


def _roc_panel(detector: str, panel: str) -> list[FigureCurve]:
    combos = ([(rho, 10, f"rho{_tag(rho)}") for rho in (0.2, 0.4, 0.6, 0.8)] if panel == "a"
              else [(0.2, n, f"n{n}") for n in (10, 50, 100, 200)])
    curves = []
    for rho, n, suffix in combos:
        curves.append(_roc_figure_curve(f"exact_{suffix}", detector, "exact", rho, n))
        curves.append(_roc_figure_curve(f"closed_{suffix}", detector, "closed-form", rho, n))
    return curves


def _fig8_panel(panel: str) -> list[FigureCurve]:
    combos = ([(rho, 10, f"rho{_tag(rho)}") for rho in (0.0, 0.3, 0.6)] if panel == "a"
              else [(0.1, n, f"n{n}") for n in (25, 50, 75, 100)])
    hi = max(n * rho + 8.0 * math.sqrt(n / 2.0) for rho, n, _ in combos)
    xts = np.linspace(0.0, math.ceil(hi), 401)
    curves = []
    for rho, n, suffix in combos:
        # Densities in the normalized variable x_tilde = 2x/(sigma1 sigma2).
        curves.append(_curve_from_points(
            f"exact_{suffix}", {"rho": rho, "n": n, "sigma1": 1.0, "sigma2": 1.0},
            ("x_tilde", "density", "status"),
            xts, lambda xt, rho=rho, n=n: dist.pdf_ddn_exact(xt / 2.0, 1.0, 1.0, rho, n) / 2.0))
        rice = dist.rice_approx_for_ddn(1.0, 1.0, rho, n)
        scaled = dist.RiceParams(alpha=2.0 * rice.alpha, beta=2.0 * rice.beta)
        curves.append(_curve_from_points(
            f"rice_{suffix}", {"rho": rho, "n": n, "alpha": scaled.alpha, "beta": scaled.beta},
            ("x_tilde", "density", "status"),
            xts, lambda xt, p=scaled: dist.pdf_rice(xt, p)))
    return curves


def _fig9() -> list[FigureCurve]:
    def pair_for(rho: float):
        def pair(n: int):
            rice = dist.rice_approx_for_ddn(1.0, 1.0, rho, n)
            return (dist.DistributionSpec("ddn-exact",
                                          {"sigma1": 1.0, "sigma2": 1.0, "rho": rho, "n": n}),
                    dist.DistributionSpec("rice", {"alpha": rice.alpha, "beta": rice.beta}))
        return pair

    return [
        _tvd_sweep_curve(f"rho{_tag(rho)}", {"rho": rho, "sigma1": 1.0, "sigma2": 1.0,
                                             "n_grid": list(_TVD_N_GRID)},
                         _TVD_N_GRID, pair_for(rho))
        for rho in (0.2, 0.4, 0.6)
    ]


def _fig11() -> list[FigureCurve]:
    curves = []
    for rho in (0.2, 0.5, 0.8):
        curves.append(_roc_figure_curve(f"rho_rho{_tag(rho)}", "rho-hat", "exact", rho, 10))
        curves.append(_roc_figure_curve(f"ddn_rho{_tag(rho)}", "ddn", "exact", rho, 10))
    return curves


_BUILDERS: dict[str, Callable[[], list[FigureCurve]]] = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3a": lambda: _fig3_panel("a"),
    "fig3b": lambda: _fig3_panel("b"),
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6a": lambda: _fig6_panel("a"),
    "fig6b": lambda: _fig6_panel("b"),
    "fig7a": lambda: _roc_panel("rho-hat", "a"),
    "fig7b": lambda: _roc_panel("rho-hat", "b"),
    "fig8a": lambda: _fig8_panel("a"),
    "fig8b": lambda: _fig8_panel("b"),
    "fig9": _fig9,
    "fig10a": lambda: _roc_panel("ddn", "a"),
    "fig10b": lambda: _roc_panel("ddn", "b"),
    "fig11": _fig11,
}

_PANELS: dict[str, tuple[str, ...]] = {
    "fig3": ("fig3a", "fig3b"),
    "fig6": ("fig6a", "fig6b"),
    "fig7": ("fig7a", "fig7b"),
    "fig8": ("fig8a", "fig8b"),
    "fig10": ("fig10a", "fig10b"),
}


def figure_ids() -> tuple[str, ...]:
    """All accepted figure ids, including panel ids."""
    whole = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
             "fig9", "fig10", "fig11")
    return whole + tuple(k for k in _BUILDERS if k not in whole)


def generate_figure(figure_id: str) -> list[FigureCurve]:
    """Generate all curves of a figure (panel curves get an 'a_'/'b_' prefix)."""
    if figure_id in _BUILDERS:
        return _BUILDERS[figure_id]()
    if figure_id in _PANELS:
        curves = []
        for panel_id in _PANELS[figure_id]:
            prefix = panel_id[len(figure_id):]  # 'a' or 'b'
            for curve in _BUILDERS[panel_id]():
                curves.append(FigureCurve(
                    name=f"{prefix}_{curve.name}", params=curve.params,
                    columns=curve.columns, rows=curve.rows,
                    status=curve.status, failed_points=curve.failed_points))
        return curves
    raise ParameterError(f"unknown figure id {figure_id!r}; expected one of {figure_ids()}")
