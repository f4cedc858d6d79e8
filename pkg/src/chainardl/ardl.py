"""ARDL estimation in levels and its error-correction reparametrisation.

The levels model is::

    y_t = c0 + c1*t + sum_{i=1..p} phi_i y_{t-i}
          + sum_j sum_{i=0..q_j} beta_{j,i} x_{j,t-i} + gamma'z_t + u_t

and the error-correction regression estimated by :func:`to_ecm` is::

    dy_t = c0 + c1*t + alpha*y_{t-1} + sum_j pi_j*x_{j,t-1}
           + sum_{i=1..p-1} psi_i dy_{t-i}
           + sum_j sum_{i=0..q_j-1} psi_{j,i} dx_{j,t-i} + gamma'z_t + u_t

For a regressor with ``q_j = 0`` the levels term enters as ``x_{j,t}``
instead (there is no ``dx_{j,t}`` term to absorb the difference), which
keeps the two regressions exact reparametrisations of each other.
Long-run coefficients are ``theta_j = -pi_j / alpha``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import (CollinearityError, DataGapError, EstimationError,
                     NoErrorCorrectionError, SelectionError)
from .frame import Frame, display_name, from_day
from .regress import OlsFit, covariance, information_criteria, ols_fit, stars, t_stats
from .unitroot import Deterministic, DETERMINISTICS

DEFAULT_P_MAX = 4
DEFAULT_Q_MAX = 4
EXHAUSTIVE_GRID_LIMIT = 5000


@dataclass(frozen=True)
class ArdlSpec:
    p: int
    q: tuple[int, ...]
    det: Deterministic = "const"
    exog: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        object.__setattr__(self, "exog", tuple(self.exog))
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if any(v < 0 for v in self.q):
            raise ValueError("q entries must be non-negative")
        if self.det not in DETERMINISTICS:
            raise ValueError(f"unknown deterministic spec {self.det!r}")

    @property
    def max_lag(self) -> int:
        return max((self.p, *self.q))

    @property
    def n_det(self) -> int:
        return {"none": 0, "const": 1, "const+trend": 2}[self.det]

    @property
    def n_params(self) -> int:
        return self.n_det + self.p + sum(v + 1 for v in self.q) + len(self.exog)


def _series(frame: Frame, names: Sequence[str]) -> list[np.ndarray]:
    missing = [n for n in names if n not in frame]
    if missing:
        raise KeyError(f"columns not in frame: {', '.join(missing)}")
    return [frame[n] for n in names]


def _det_columns(det: str, t: np.ndarray):
    cols, names = [], []
    if det in ("const", "const+trend"):
        cols.append(np.ones(t.size))
        names.append("const")
    if det == "const+trend":
        cols.append(t.astype(np.float64))
        names.append("trend")
    return cols, names


def _check_gaps(frame: Frame, t: np.ndarray, X: np.ndarray, y: np.ndarray, what: str):
    bad = np.isnan(y) | np.isnan(X).any(axis=1)
    if bad.any():
        days = frame.dates[t[bad]]
        shown = ", ".join(from_day(d).isoformat() for d in days[:10])
        more = "" if bad.sum() <= 10 else f" (+{int(bad.sum()) - 10} more)"
        raise DataGapError(f"{what}: missing values inside the estimation window at {shown}{more}",
                           [from_day(d) for d in days])


def _lag_name(name: str, i: int) -> str:
    return name if i == 0 else f"{name}(-{i})"


def levels_design(frame: Frame, y: str, x: Sequence[str], spec: ArdlSpec, first: int | None = None):
    """Levels design matrix, response, column names and row index vector."""
    if len(x) != len(spec.q):
        raise ValueError("one q entry is required per regressor")
    overlap = set(spec.exog) & set(x)
    if overlap:
        raise ValueError(f"exogenous and endogenous sets overlap: {sorted(overlap)}")
    first = spec.max_lag if first is None else first
    if first < spec.max_lag:
        raise ValueError("first row must leave room for all lags")
    yv, *xv = _series(frame, [y, *x])
    zv = _series(frame, spec.exog)
    t = np.arange(first, len(frame))
    cols, names = _det_columns(spec.det, t)
    for i in range(1, spec.p + 1):
        cols.append(yv[t - i])
        names.append(_lag_name(y, i))
    for name, series, q in zip(x, xv, spec.q):
        for i in range(q + 1):
            cols.append(series[t - i])
            names.append(_lag_name(name, i))
    for name, series in zip(spec.exog, zv):
        cols.append(series[t])
        names.append(name)
    X = np.column_stack(cols) if cols else np.empty((t.size, 0))
    return X, yv[t], names, t


@dataclass(frozen=True, eq=False)
class ArdlFit:
    spec: ArdlSpec
    y: str
    x: tuple[str, ...]
    ols: OlsFit
    rows: np.ndarray = field(repr=False)
    frame: Frame = field(repr=False)

    @property
    def sample(self):
        return from_day(self.frame.dates[self.rows[0]]), from_day(self.frame.dates[self.rows[-1]])

    def coef(self, name: str) -> float:
        return float(self.ols.coef[self.ols.index(name)])


def fit_ardl(frame: Frame, y: str, x: Sequence[str], spec: ArdlSpec, first: int | None = None) -> ArdlFit:
    """OLS estimate of the ARDL levels model.

    The effective sample starts after the longest lag (or at ``first``).
    """
    x = tuple(x)
    X, yy, names, t = levels_design(frame, y, x, spec, first)
    _check_gaps(frame, t, X, yy, f"ARDL for {y}")
    if t.size < 10 + X.shape[1]:
        raise EstimationError(f"effective sample of {t.size} rows is too short for {X.shape[1]} regressors")
    return ArdlFit(spec, y, x, ols_fit(X, yy, names), t, frame)


# ---------------------------------------------------------------------------
# Lag selection


class _LagBank:
    """All candidate columns over the common sample, built once."""

    def __init__(self, frame, y, x, p_max, q_max, det, exog):
        spec = ArdlSpec(p_max, (q_max,) * len(x), det, exog)
        self.X, self.y, names, self.t = levels_design(frame, y, x, spec)
        _check_gaps(frame, self.t, self.X, self.y, f"lag selection for {y}")
        self.names = names
        pos = {n: i for i, n in enumerate(names)}
        self.det_idx = [pos[n] for n in ("const", "trend") if n in pos]
        self.y_idx = [pos[_lag_name(y, i)] for i in range(1, p_max + 1)]
        self.x_idx = [[pos[_lag_name(n, i)] for i in range(q_max + 1)] for n in x]
        self.z_idx = [pos[n] for n in exog]

    def columns(self, p: int, q: Sequence[int]) -> list[int]:
        idx = list(self.det_idx) + self.y_idx[:p]
        for j, qj in enumerate(q):
            idx += self.x_idx[j][: qj + 1]
        return idx + self.z_idx

    def aic(self, p: int, q: Sequence[int]) -> float:
        idx = self.columns(p, q)
        fit = ols_fit(self.X[:, idx], self.y, [self.names[i] for i in idx])
        return information_criteria(fit)[0]


def _selection_key(aic: float, p: int, q: tuple[int, ...]):
    return (aic, p + sum(q), (p, *q))


def aic_grid(frame: Frame, y: str, x: Sequence[str], p_max: int = DEFAULT_P_MAX,
             q_max: int = DEFAULT_Q_MAX, det: Deterministic = "const",
             exog: Sequence[str] = ()) -> dict[tuple[int, tuple[int, ...]], float]:
    """AIC of every candidate on the common sample; collinear candidates are omitted."""
    bank = _LagBank(frame, y, tuple(x), p_max, q_max, det, tuple(exog))
    out = {}
    for p in range(1, p_max + 1):
        for q in itertools.product(range(q_max + 1), repeat=len(x)):
            try:
                out[(p, q)] = bank.aic(p, q)
            except CollinearityError:
                continue
    return out


def select_lags(frame: Frame, y: str, x: Sequence[str], p_max: int = DEFAULT_P_MAX,
                q_max: int = DEFAULT_Q_MAX, det: Deterministic = "const",
                exog: Sequence[str] = (), grid_limit: int = EXHAUSTIVE_GRID_LIMIT) -> ArdlSpec:
    """AIC lag selection over ``p in 1..p_max`` and ``q_j in 0..q_max``.

    All candidates share the sample trimmed at ``max(p_max, q_max)``. Ties
    go to the smaller parameter count, then the lexicographically smaller
    ``(p, q)``. Grids larger than ``grid_limit`` are searched by cyclic
    coordinate descent from ``(1, 0, ..., 0)`` instead of exhaustively.
    """
    if p_max < 1 or q_max < 0:
        raise ValueError("need p_max >= 1 and q_max >= 0")
    x, exog = tuple(x), tuple(exog)
    bank = _LagBank(frame, y, x, p_max, q_max, det, exog)
    cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def score(p, q):
        key = (p, q)
        if key not in cache:
            try:
                cache[key] = bank.aic(p, q)
            except CollinearityError:
                cache[key] = np.inf
        return cache[key]

    grid_size = p_max * (q_max + 1) ** len(x)
    if grid_size <= grid_limit:
        candidates = ((p, q) for p in range(1, p_max + 1)
                      for q in itertools.product(range(q_max + 1), repeat=len(x)))
        best = min(candidates, key=lambda c: _selection_key(score(*c), *c))
    else:
        best = (1, (0,) * len(x))
        changed = True
        while changed:
            changed = False
            for coord in range(len(x) + 1):
                if coord == 0:
                    options = [(p, best[1]) for p in range(1, p_max + 1)]
                else:
                    options = []
                    for v in range(q_max + 1):
                        q = list(best[1])
                        q[coord - 1] = v
                        options.append((best[0], tuple(q)))
                choice = min(options, key=lambda c: _selection_key(score(*c), *c))
                if choice != best:
                    best, changed = choice, True
    if not np.isfinite(score(*best)):
        raise SelectionError(f"every candidate lag specification for {y} is rank-deficient")
    return ArdlSpec(best[0], best[1], det, exog)


# ---------------------------------------------------------------------------
# Error-correction form


@dataclass(frozen=True)
class Coefficient:
    name: str
    coef: float
    se: float
    t: float
    p: float


@dataclass(frozen=True, eq=False)
class EcmFit:
    levels: ArdlFit
    ols: OlsFit
    cov: np.ndarray = field(repr=False)
    se: np.ndarray = field(repr=False)
    alpha: float
    alpha_se: float
    theta: np.ndarray
    theta_se: np.ndarray
    level_names: tuple[str, ...]

    @property
    def spec(self) -> ArdlSpec:
        return self.levels.spec

    @property
    def y(self) -> str:
        return self.levels.y

    @property
    def x(self) -> tuple[str, ...]:
        return self.levels.x

    @property
    def level_index(self) -> list[int]:
        return [self.ols.index(n) for n in self.level_names]

    @property
    def theta_p(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            t = self.theta / self.theta_se
        return 2.0 * stats.t.sf(np.abs(t), self.ols.df_resid)

    @property
    def alpha_p(self) -> float:
        return float(2.0 * stats.t.sf(abs(self.alpha / self.alpha_se), self.ols.df_resid))

    @property
    def shortrun(self) -> list[Coefficient]:
        """Robust-SE coefficients of every non-levels term."""
        t, p = t_stats(self.ols, self.se)
        skip = set(self.level_names)
        return [Coefficient(n, float(c), float(s), float(tt), float(pp))
                for n, c, s, tt, pp in zip(self.ols.regressor_names, self.ols.coef, self.se, t, p)
                if n not in skip]

    def long_run_levels_fitted(self) -> np.ndarray:
        """ECM fitted values mapped back to levels (``y_{t-1}`` + fitted difference)."""
        yv = self.levels.frame[self.y]
        return yv[self.levels.rows - 1] + self.ols.fitted


def _diff_at(v: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return v[idx] - v[idx - 1]


def ecm_design(frame: Frame, y: str, x: Sequence[str], spec: ArdlSpec, rows: np.ndarray):
    yv, *xv = _series(frame, [y, *x])
    zv = _series(frame, spec.exog)
    t = rows
    cols, names = _det_columns(spec.det, t)
    level_names = []
    cols.append(yv[t - 1])
    names.append(_lag_name(y, 1))
    level_names.append(names[-1])
    for name, series, q in zip(x, xv, spec.q):
        lag = 1 if q >= 1 else 0
        cols.append(series[t - lag])
        names.append(_lag_name(name, lag))
        level_names.append(names[-1])
    for i in range(1, spec.p):
        cols.append(_diff_at(yv, t - i))
        names.append("D." + _lag_name(y, i))
    for name, series, q in zip(x, xv, spec.q):
        for i in range(q):
            cols.append(_diff_at(series, t - i))
            names.append("D." + _lag_name(name, i))
    for name, series in zip(spec.exog, zv):
        cols.append(series[t])
        names.append(name)
    return np.column_stack(cols), _diff_at(yv, t), names, level_names


def _long_run_delta(fit: ArdlFit) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """theta, its delta-method SEs and the gradient matrix, from the levels fit."""
    ols = fit.ols
    names = ols.regressor_names
    phi_idx = [names.index(_lag_name(fit.y, i)) for i in range(1, fit.spec.p + 1)]
    one_minus_phi = 1.0 - float(np.sum(ols.coef[phi_idx]))
    cov, _ = covariance(ols, "robust_hc1")
    k = len(fit.x)
    theta = np.empty(k)
    grads = np.zeros((k, ols.k))
    for j, (name, q) in enumerate(zip(fit.x, fit.spec.q)):
        b_idx = [names.index(_lag_name(name, i)) for i in range(q + 1)]
        b = float(np.sum(ols.coef[b_idx]))
        theta[j] = b / one_minus_phi
        grads[j, b_idx] = 1.0 / one_minus_phi
        grads[j, phi_idx] = b / one_minus_phi**2
    theta_cov = grads @ cov @ grads.T
    theta_se = np.sqrt(np.clip(np.diag(theta_cov), 0.0, None))
    return theta, theta_se, grads


NEAR_UNIT_TOL = 1e-6


def to_ecm(fit: ArdlFit) -> EcmFit:
    """Estimate the error-correction form of a levels ARDL fit.

    Raises NoErrorCorrectionError when the lag polynomial of ``y`` has a
    root at one (``|1 - sum(phi)| <= 1e-6``), leaving long-run
    coefficients undefined.
    """
    spec = fit.spec
    phi_sum = sum(fit.coef(_lag_name(fit.y, i)) for i in range(1, spec.p + 1))
    if abs(1.0 - phi_sum) <= NEAR_UNIT_TOL:
        raise NoErrorCorrectionError(f"sum of autoregressive coefficients is {phi_sum:.8f}; no error correction")
    X, dy, names, level_names = ecm_design(fit.frame, fit.y, fit.x, spec, fit.rows)
    ols = ols_fit(X, dy, names)
    cov, se = covariance(ols, "robust_hc1")
    a_idx = ols.index(level_names[0])
    alpha = float(ols.coef[a_idx])
    pis = np.array([ols.coef[ols.index(n)] for n in level_names[1:]])
    theta = -pis / alpha
    _, theta_se, _ = _long_run_delta(fit)
    return EcmFit(fit, ols, cov, se, alpha, float(se[a_idx]), theta, theta_se, tuple(level_names))


def fit_difference(frame: Frame, y: str, x: Sequence[str], spec: ArdlSpec,
                   rows: np.ndarray | None = None) -> OlsFit:
    """Short-run regression in first differences, without a levels term.

    Used when the bounds test cannot reject the absence of a levels
    relationship. Each regressor keeps its selected difference lags, and
    at least its contemporaneous difference.
    """
    x = tuple(x)
    if rows is None:
        rows = np.arange(spec.max_lag + 1, len(frame))
    yv, *xv = _series(frame, [y, *x])
    zv = _series(frame, spec.exog)
    t = rows
    cols, names = _det_columns(spec.det, t)
    for i in range(1, spec.p):
        cols.append(_diff_at(yv, t - i))
        names.append("D." + _lag_name(y, i))
    for name, series, q in zip(x, xv, spec.q):
        for i in range(max(q, 1)):
            cols.append(_diff_at(series, t - i))
            names.append("D." + _lag_name(name, i))
    for name, series in zip(spec.exog, zv):
        cols.append(series[t])
        names.append(name)
    X, dy = np.column_stack(cols), _diff_at(yv, t)
    _check_gaps(frame, t, X, dy, f"first-difference model for {y}")
    return ols_fit(X, dy, names)


# ---------------------------------------------------------------------------
# Report rows


@dataclass(frozen=True)
class ReportRow:
    """One table cell source.

    ``section`` orders row groups: 0 long-run regressors, 1 error-correction
    term, 2 lagged dependent differences, 3 regressor differences,
    4 exogenous levels, 5 trend, 6 constant.
    """

    key: str
    label: str
    section: int
    variable: str
    lag: int
    value: float
    se: float
    p: float

    @property
    def stars(self) -> str:
        return stars(self.p)


def _parse_term(name: str) -> tuple[str, int, bool]:
    diff = name.startswith("D.")
    base = name[2:] if diff else name
    lag = 0
    if base.endswith(")") and "(-" in base:
        base, _, tail = base.rpartition("(-")
        lag = int(tail[:-1])
    return base, lag, diff


def _term_label(base: str, lag: int, diff: bool) -> str:
    label = display_name(base)
    if diff:
        label = "Δ " + label
    return f"{label} (-{lag})" if lag else label


def long_run_table(ecm: EcmFit) -> list[ReportRow]:
    """Long-run coefficients with delta-method SEs, then the adjustment term."""
    rows = []
    for name, th, se, p in zip(ecm.x, ecm.theta, ecm.theta_se, ecm.theta_p):
        rows.append(ReportRow(f"lr:{name}", display_name(name), 0, name, 0, float(th), float(se), float(p)))
    rows.append(ReportRow("ec", f"{display_name(ecm.y)} (-1)", 1, ecm.y, 1,
                          ecm.alpha, ecm.alpha_se, ecm.alpha_p))
    return rows


def coefficient_rows(names: Sequence[str], coefs: Iterable[Coefficient], y: str) -> list[ReportRow]:
    rows = []
    for c in coefs:
        base, lag, is_diff = _parse_term(c.name)
        if c.name == "const":
            section, label = 6, "Const"
        elif c.name == "trend":
            section, label = 5, "Trend"
        elif is_diff and base == y:
            section, label = 2, _term_label(base, lag, True)
        elif is_diff:
            section, label = 3, _term_label(base, lag, True)
        else:
            section, label = 4, display_name(base)
        rows.append(ReportRow(f"sr:{c.name}", label, section, base, lag, c.coef, c.se, c.p))
    return rows


def short_run_table(ecm: EcmFit) -> list[ReportRow]:
    """Short-run multipliers, exogenous terms and deterministics (robust SEs)."""
    return coefficient_rows(ecm.ols.regressor_names, ecm.shortrun, ecm.y)


def difference_rows(ols: OlsFit, y: str) -> list[ReportRow]:
    _, se = covariance(ols, "robust_hc1")
    t, p = t_stats(ols, se)
    coefs = [Coefficient(n, float(c), float(s), float(tt), float(pp))
             for n, c, s, tt, pp in zip(ols.regressor_names, ols.coef, se, t, p)]
    return coefficient_rows(ols.regressor_names, coefs, y)
