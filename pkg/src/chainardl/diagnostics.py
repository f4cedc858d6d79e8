"""Residual and stability diagnostics for fitted regressions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from .errors import CollinearityError, DegenerateSeriesError, InsufficientDataError
from .regress import OlsFit, f_from_rss, ols_fit

# Brown-Durbin-Evans boundary constants.
CUSUM_CRITICAL = {0.01: 1.143, 0.05: 0.948, 0.10: 0.850}


class TestResult(NamedTuple):
    stat: float
    dof: int | tuple[int, int]
    p: float


def _negligible(fit: OlsFit) -> bool:
    """Residuals at rounding level relative to the response carry no information."""
    return float(np.linalg.norm(fit.resid)) <= 1e-10 * float(np.linalg.norm(fit.y))


def _lagged_residuals(e: np.ndarray, order: int) -> np.ndarray:
    lags = np.zeros((e.size, order))
    for i in range(1, order + 1):
        lags[i:, i - 1] = e[:-i]
    return lags


def _check_order(fit: OlsFit, order: int):
    if order < 1:
        raise ValueError("order must be at least 1")
    if fit.n - fit.k - order <= 5:
        raise InsufficientDataError(
            f"order {order} leaves {fit.n - fit.k - order} residual degrees of freedom (need > 5)")


def _aux_serial(fit: OlsFit, order: int):
    e = fit.resid
    Z = np.column_stack([fit.X, _lagged_residuals(e, order)])
    names = [*fit.regressor_names, *(f"resid(-{i})" for i in range(1, order + 1))]
    return e, ols_fit(Z, e, names)


def breusch_godfrey(fit: OlsFit, order: int = 1) -> TestResult:
    """LM test for serial correlation up to ``order``: n * R^2 of the auxiliary regression."""
    _check_order(fit, order)
    e = fit.resid
    ee = float(e @ e)
    if _negligible(fit):
        return TestResult(0.0, order, 1.0)
    _, aux = _aux_serial(fit, order)
    r2 = 1.0 - aux.rss / ee
    stat = fit.n * max(r2, 0.0)
    return TestResult(float(stat), order, float(stats.chi2.sf(stat, order)))


def durbin_alternative(fit: OlsFit, order: int = 1) -> TestResult:
    """Durbin's alternative test: F on the lagged-residual block of the auxiliary regression."""
    _check_order(fit, order)
    e = fit.resid
    df2 = fit.n - fit.k - order
    ee = float(e @ e)
    if _negligible(fit):
        return TestResult(0.0, (order, df2), 1.0)
    _, aux = _aux_serial(fit, order)
    res = f_from_rss(ee, aux.rss, order, df2)
    return TestResult(res.F, (order, df2), res.p)


def breusch_pagan(fit: OlsFit) -> TestResult:
    """Cook-Weisberg form: scaled squared residuals on the fitted values, ESS / 2 ~ chi2(1)."""
    e2 = fit.resid**2
    scale = float(e2.mean())
    fitted = fit.fitted
    if _negligible(fit):
        raise DegenerateSeriesError("residual variance is zero")
    if np.ptp(fitted) == 0.0:
        raise DegenerateSeriesError("fitted values are constant")
    g = e2 / scale
    aux = ols_fit(np.column_stack([np.ones(fit.n), fitted]), g, ["const", "fitted"])
    ess = float(np.sum((aux.fitted - g.mean()) ** 2))
    stat = ess / 2.0
    return TestResult(stat, 1, float(stats.chi2.sf(stat, 1)))


def normality_test(resid) -> TestResult:
    """Jarque-Bera statistic n/6 * (S^2 + (K - 3)^2 / 4)."""
    e = np.asarray(resid, dtype=np.float64)
    n = e.size
    if n < 20:
        raise InsufficientDataError(f"normality test needs at least 20 residuals, got {n}")
    d = e - e.mean()
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        return TestResult(0.0, 2, 1.0)
    skew = float(np.mean(d**3)) / m2**1.5
    kurt = float(np.mean(d**4)) / m2**2
    stat = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    return TestResult(stat, 2, float(stats.chi2.sf(stat, 2)))


# ---------------------------------------------------------------------------
# CUSUM


def _full_rank(X: np.ndarray) -> bool:
    s = np.linalg.svd(X, compute_uv=False)
    return s.size == X.shape[1] and s[-1] > 1e-10 * s[0]


def recursive_residuals(X, y, skip_singular: bool = False) -> tuple[np.ndarray, int]:
    """One-step-ahead standardised prediction errors.

    Returns the residuals for rows ``start..n-1`` and ``start``. The
    recursion starts from the first ``k`` rows; with ``skip_singular`` it
    starts instead from the shortest leading window of full column rank.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(f"{n} observations for {k} regressors")
    scale = np.abs(X).max(axis=0)
    if np.any(scale == 0):
        raise CollinearityError("all-zero regressor column")
    Xs = X / scale

    start = k
    if not _full_rank(Xs[:k]):
        if not skip_singular:
            raise CollinearityError(f"initial recursive window of {k} rows is rank-deficient")
        lo, hi = k, n
        if not _full_rank(Xs[:hi]):
            raise CollinearityError("regressors are collinear over the full sample")
        while lo < hi:
            mid = (lo + hi) // 2
            if _full_rank(Xs[:mid]):
                hi = mid
            else:
                lo = mid + 1
        start = lo
        if start >= n:
            raise CollinearityError("no full-rank window leaves observations to test")

    X0 = Xs[:start]
    P = np.linalg.inv(X0.T @ X0)
    beta = P @ (X0.T @ y[:start])
    w = np.empty(n - start)
    for t in range(start, n):
        xt = Xs[t]
        Px = P @ xt
        f = 1.0 + xt @ Px
        err = y[t] - xt @ beta
        w[t - start] = err / np.sqrt(f)
        P -= np.outer(Px, Px) / f
        beta = beta + Px * (err / f)
    return w, start


@dataclass(frozen=True)
class CusumResult:
    path: np.ndarray = field(repr=False)
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)
    stable: bool
    start: int
    level: float = 0.05


def cusum(X, y, level: float = 0.05, skip_singular: bool = False) -> CusumResult:
    """CUSUM of recursive residuals with Brown-Durbin-Evans boundaries.

    ``path[r] = sum(w[:r+1]) / sigma`` where ``sigma`` is the sample
    standard deviation of the recursive residuals; the boundaries are
    ``±a * (sqrt(m) + 2 r / sqrt(m))`` for ``r = 1..m``.
    """
    if level not in CUSUM_CRITICAL:
        raise ValueError(f"level must be one of {sorted(CUSUM_CRITICAL)}")
    X = np.asarray(X, dtype=np.float64)
    n, k = X.shape
    if n <= k + 10:
        raise InsufficientDataError(f"CUSUM needs more than k + 10 = {k + 10} observations")
    w, start = recursive_residuals(X, y, skip_singular)
    m = w.size
    sigma = float(np.std(w, ddof=1)) if m > 1 else 0.0
    if sigma > 0 and sigma > 1e-10 * float(np.max(np.abs(y))):
        path = np.cumsum(w) / sigma
    else:
        path = np.zeros(m)
    r = np.arange(1, m + 1)
    a = CUSUM_CRITICAL[level]
    upper = a * (np.sqrt(m) + 2.0 * r / np.sqrt(m))
    stable = bool(np.all(np.abs(path) <= upper))
    return CusumResult(path, -upper, upper, stable, start, level)


@dataclass(frozen=True)
class DiagnosticsReport:
    bg_lm: dict[int, TestResult]
    durbin_alt: dict[int, TestResult]
    breusch_pagan: TestResult
    normality: TestResult
    cusum: CusumResult | None
    cusum_error: str = ""


def run_diagnostics(fit: OlsFit, orders: Sequence[int] = (1,), skip_singular: bool = True) -> DiagnosticsReport:
    """Full battery on a fitted regression."""
    bg = {o: breusch_godfrey(fit, o) for o in orders}
    da = {o: durbin_alternative(fit, o) for o in orders}
    bp = breusch_pagan(fit)
    jb = normality_test(fit.resid)
    try:
        cs, err = cusum(fit.X, fit.y, skip_singular=skip_singular), ""
    except (CollinearityError, InsufficientDataError) as exc:
        cs, err = None, str(exc)
    return DiagnosticsReport(bg, da, bp, jb, cs, err)
