"""Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Critical values come from MacKinnon's (2010) response surfaces for the
single-series tau statistic::

    cv(T) = b0 + b1/T + b2/T**2 + b3/T**3

which are shared by the ADF and the Phillips-Perron Z(t) statistic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DegenerateSeriesError, InsufficientDataError
from .regress import ols_fit, information_criteria

Deterministic = Literal["none", "const", "const+trend"]
DETERMINISTICS = ("none", "const", "const+trend")

# MacKinnon (2010), Table 2, N = 1. Rows are the 1%, 5% and 10% levels.
_TAU_SURFACE = {
    "none": (
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ),
    "const": (
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ),
    "const+trend": (
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ),
}
LEVELS = (0.01, 0.05, 0.10)


def critical_values(det: Deterministic, nobs: int) -> dict[float, float]:
    """Finite-sample critical values of the tau statistic."""
    _check_det(det)
    out = {}
    for level, (b0, b1, b2, b3) in zip(LEVELS, _TAU_SURFACE[det]):
        out[level] = b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3
    return out


def _check_det(det):
    if det not in DETERMINISTICS:
        raise ValueError(f"deterministic spec must be one of {DETERMINISTICS}, got {det!r}")


@dataclass(frozen=True)
class UnitRootResult:
    test: str
    stat: float
    det: str
    lags_or_bandwidth: int
    nobs: int
    crit: dict = field(repr=False)
    series_name: str = ""

    @property
    def pvalue_band(self) -> tuple[float, float]:
        """Interval bracketing the p-value, from the 1/5/10% critical values."""
        edges = (0.0, *LEVELS, 1.0)
        for i, level in enumerate(LEVELS):
            if self.stat < self.crit[level]:
                return (edges[i], edges[i + 1])
        return (LEVELS[-1], 1.0)

    @property
    def reject_5pct(self) -> bool:
        return bool(self.stat < self.crit[0.05])

    def reject(self, level: float) -> bool:
        return bool(self.stat < self.crit[level])


def _prepare(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    ok = np.flatnonzero(~np.isnan(x))
    if ok.size == 0:
        raise InsufficientDataError(f"series {name or '<unnamed>'} has no observations")
    x = x[ok[0]: ok[-1] + 1]
    if np.any(np.isnan(x)):
        raise InsufficientDataError(f"series {name or '<unnamed>'} has interior gaps")
    if np.ptp(x) == 0:
        raise DegenerateSeriesError(f"series {name or '<unnamed>'} is constant")
    return x


def _deterministic_block(det: str, t_index: np.ndarray) -> tuple[list[np.ndarray], list[str]]:
    cols, names = [], []
    if det in ("const", "const+trend"):
        cols.append(np.ones(t_index.size))
        names.append("const")
    if det == "const+trend":
        cols.append(t_index.astype(np.float64))
        names.append("trend")
    return cols, names


def _df_design(x: np.ndarray, dx: np.ndarray, det: str, lags: int, first: int):
    """Design for dx[t] on det, x[t-1], dx[t-1..t-lags] over t >= first (t indexes x)."""
    t = np.arange(first, x.size)
    cols, names = _deterministic_block(det, t)
    cols.append(x[t - 1])
    names.append("level(-1)")
    for i in range(1, lags + 1):
        cols.append(dx[t - i])
        names.append(f"diff(-{i})")
    return np.column_stack(cols), dx[t], names


def schwert_max_lag(n: int) -> int:
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def adf_test(x, det: Deterministic = "const", max_lag: int | None = None,
             selection: Literal["aic", "fixed"] = "aic", name: str = "") -> UnitRootResult:
    """Augmented Dickey-Fuller test.

    With ``selection="aic"`` the augmentation order is chosen over
    ``0..max_lag`` on the common sample, then the chosen model is re-run
    on all available observations. ``selection="fixed"`` uses ``max_lag``.
    """
    _check_det(det)
    x = _prepare(x, name)
    n = x.size
    if max_lag is None:
        max_lag = schwert_max_lag(n)
    if n <= max_lag + 10:
        raise InsufficientDataError(f"series {name or '<unnamed>'}: {n} observations for max_lag {max_lag}")
    dx = np.empty(n)
    dx[0] = np.nan
    dx[1:] = np.diff(x)

    if selection == "aic":
        first = max_lag + 1
        best, best_aic = 0, np.inf
        for lags in range(max_lag + 1):
            X, y, names = _df_design(x, dx, det, lags, first)
            aic, _ = information_criteria(ols_fit(X, y, names))
            if aic < best_aic:
                best, best_aic = lags, aic
        lags = best
    elif selection == "fixed":
        lags = max_lag
    else:
        raise ValueError(f"unknown lag selection {selection!r}")

    X, y, names = _df_design(x, dx, det, lags, lags + 1)
    fit = ols_fit(X, y, names)
    j = names.index("level(-1)")
    se = np.sqrt(fit.sigma2 * fit.xtx_inv[j, j])
    stat = fit.coef[j] / se if se > 0 else -np.inf
    return UnitRootResult("ADF", float(stat), det, lags, fit.n, critical_values(det, fit.n), name)


def pp_bandwidth(n: int) -> int:
    return int(np.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def bartlett_lrv(u: np.ndarray, bandwidth: int) -> float:
    """Newey-West long-run variance with Bartlett weights (divisor T)."""
    T = u.size
    lrv = float(u @ u) / T
    for j in range(1, bandwidth + 1):
        gamma = float(u[j:] @ u[:-j]) / T
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma
    return lrv


def pp_test(x, det: Deterministic = "const", bandwidth: int | str = "auto",
            name: str = "") -> UnitRootResult:
    """Phillips-Perron Z(t) test.

    The Dickey-Fuller regression without augmentation is corrected with a
    Bartlett-kernel long-run variance of its residuals.
    """
    _check_det(det)
    x = _prepare(x, name)
    n = x.size
    if bandwidth == "auto":
        bandwidth = pp_bandwidth(n)
    bandwidth = int(bandwidth)
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    if n <= bandwidth + 10:
        raise InsufficientDataError(f"series {name or '<unnamed>'}: {n} observations for bandwidth {bandwidth}")
    dx = np.empty(n)
    dx[0] = np.nan
    dx[1:] = np.diff(x)
    X, y, names = _df_design(x, dx, det, 0, 1)
    fit = ols_fit(X, y, names)
    j = names.index("level(-1)")
    T = fit.n
    s2 = fit.sigma2
    se = np.sqrt(s2 * fit.xtx_inv[j, j])
    u = fit.resid
    gamma0 = float(u @ u) / T
    lam2 = bartlett_lrv(u, bandwidth)
    if s2 <= 0 or lam2 <= 0:
        raise DegenerateSeriesError(f"series {name or '<unnamed>'}: degenerate residual variance")
    t_rho = fit.coef[j] / se
    lam = np.sqrt(lam2)
    z_t = np.sqrt(gamma0 / lam2) * t_rho - 0.5 * (lam2 - gamma0) / lam * (T * se / np.sqrt(s2))
    return UnitRootResult("PP", float(z_t), det, bandwidth, T, critical_values(det, T), name)


@dataclass(frozen=True)
class IntegrationVerdict:
    series_name: str
    order: str
    adf_level: UnitRootResult
    pp_level: UnitRootResult
    adf_diff: UnitRootResult | None
    pp_diff: UnitRootResult | None
    notes: tuple[str, ...] = ()

    @property
    def is_i2(self) -> bool:
        return self.order == "I(2)+"


def classify_integration(x, det: Deterministic = "const", name: str = "",
                         max_lag: int | None = None) -> IntegrationVerdict:
    """Integration order from level and first-difference tests at 5%.

    The ADF verdict decides; disagreement with PP is recorded in ``notes``
    and raised as a warning. The first-difference tests drop the trend
    term when ``det`` has one.
    """
    x = _prepare(x, name)
    notes = []
    adf_l = adf_test(x, det, max_lag=max_lag, name=name)
    pp_l = pp_test(x, det, name=name)
    if adf_l.reject_5pct != pp_l.reject_5pct:
        notes.append(f"{name or 'series'}: ADF and PP disagree on levels; ADF verdict used")
    if adf_l.reject_5pct:
        order, adf_d, pp_d = "I(0)", None, None
    else:
        d_det = "const" if det == "const+trend" else det
        dx = np.diff(x)
        adf_d = adf_test(dx, d_det, max_lag=max_lag, name=name)
        pp_d = pp_test(dx, d_det, name=name)
        if adf_d.reject_5pct != pp_d.reject_5pct:
            notes.append(f"{name or 'series'}: ADF and PP disagree on first differences; ADF verdict used")
        order = "I(1)" if adf_d.reject_5pct else "I(2)+"
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return IntegrationVerdict(name, order, adf_l, pp_l, adf_d, pp_d, tuple(notes))
