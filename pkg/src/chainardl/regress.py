"""Ordinary least squares kernel.

Fits are computed from a QR factorisation of the column-equilibrated design
(each column divided by its Euclidean norm), so the rank check and the
solve do not depend on the units of the regressors. Every estimator in the
package goes through :func:`ols_fit`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy import linalg, stats

from .errors import CollinearityError, InsufficientDataError

RANK_TOL = 1e-10
SIGMA2_FLOOR = 1e-300

CovKind = Literal["classical", "robust_hc1"]


@dataclass(frozen=True, eq=False)
class OlsFit:
    coef: np.ndarray
    resid: np.ndarray
    sigma2: float
    xtx_inv: np.ndarray
    n: int
    k: int
    loglik: float
    regressor_names: tuple[str, ...]
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    @property
    def fitted(self) -> np.ndarray:
        return self.y - self.resid

    @property
    def rss(self) -> float:
        return float(self.resid @ self.resid)

    @property
    def df_resid(self) -> int:
        return self.n - self.k

    def index(self, name: str) -> int:
        return self.regressor_names.index(name)


def _dependent_columns(vt_row: np.ndarray, names: Sequence[str]) -> list[str]:
    weights = np.abs(vt_row)
    return [names[i] for i in np.flatnonzero(weights > 1e-6 * weights.max())]


def ols_fit(X, y, names: Sequence[str] | None = None) -> OlsFit:
    """Least squares fit of ``y`` on the columns of ``X``.

    Raises
    ------
    InsufficientDataError
        if there are no more observations than regressors.
    CollinearityError
        if the smallest-to-largest singular value ratio of the equilibrated
        design is below ``RANK_TOL``; the error names the columns involved
        in the near-dependency.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if names is None:
        names = tuple(f"x{i}" for i in range(k))
    names = tuple(names)
    if len(names) != k:
        raise ValueError("names must match the number of columns")
    if y.shape != (n,):
        raise ValueError("y must be a vector with one entry per row of X")
    if n <= k:
        raise InsufficientDataError(f"{n} observations for {k} regressors")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("design or response contains non-finite values")

    norms = np.sqrt(np.einsum("ij,ij->j", X, X))
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        cols = [names[i] for i in zero]
        raise CollinearityError(f"all-zero column(s): {', '.join(cols)}", cols)
    Xs = X / norms
    Q, R = np.linalg.qr(Xs)
    _, s, vt = np.linalg.svd(R)
    if s[-1] < RANK_TOL * s[0]:
        cols = _dependent_columns(vt[-1], names)
        raise CollinearityError(f"collinear regressors: {', '.join(cols)}", cols)

    coef = linalg.solve_triangular(R, Q.T @ y) / norms
    resid = y - X @ coef
    rss = float(resid @ resid)
    r_inv = linalg.solve_triangular(R, np.eye(k))
    xtx_inv = (r_inv @ r_inv.T) / np.outer(norms, norms)
    xtx_inv = 0.5 * (xtx_inv + xtx_inv.T)
    sigma2 = rss / (n - k)
    mle_var = max(rss / n, SIGMA2_FLOOR)
    loglik = -0.5 * n * (np.log(2.0 * np.pi) + np.log(mle_var) + 1.0)
    return OlsFit(coef, resid, sigma2, xtx_inv, n, k, float(loglik), names, X, y)


def covariance(fit: OlsFit, kind: CovKind = "classical") -> tuple[np.ndarray, np.ndarray]:
    """Coefficient covariance and standard errors.

    ``robust_hc1`` is White's sandwich scaled by ``n/(n-k)``.
    """
    if kind == "classical":
        cov = fit.sigma2 * fit.xtx_inv
    elif kind == "robust_hc1":
        scores = fit.X * fit.resid[:, None]
        meat = scores.T @ scores
        cov = fit.xtx_inv @ meat @ fit.xtx_inv * (fit.n / (fit.n - fit.k))
        cov = 0.5 * (cov + cov.T)
    else:
        raise ValueError(f"unknown covariance kind {kind!r}")
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return cov, se


def information_criteria(fit: OlsFit) -> tuple[float, float]:
    aic = -2.0 * fit.loglik + 2.0 * fit.k
    bic = -2.0 * fit.loglik + fit.k * np.log(fit.n)
    return float(aic), float(bic)


@dataclass(frozen=True)
class WaldResult:
    F: float
    df1: int
    df2: int
    p: float


def f_from_rss(rss_r: float, rss_u: float, m: int, df2: int) -> WaldResult:
    num = max(rss_r - rss_u, 0.0) / m
    if rss_u <= 0.0:
        F = np.inf if num > 0 else 0.0
    else:
        F = num / (rss_u / df2)
    p = float(stats.f.sf(F, m, df2)) if np.isfinite(F) else 0.0
    return WaldResult(float(F), m, df2, p)


def wald_f(fit: OlsFit, restriction: Iterable[int]) -> WaldResult:
    """F test that the coefficients at ``restriction`` are jointly zero.

    The restricted model is refitted without those columns.
    """
    idx = sorted(set(int(i) for i in restriction))
    if not idx:
        raise ValueError("restriction set is empty")
    if idx[0] < 0 or idx[-1] >= fit.k:
        raise IndexError("restriction index out of range")
    keep = [j for j in range(fit.k) if j not in idx]
    if keep:
        restricted = ols_fit(fit.X[:, keep], fit.y, [fit.regressor_names[j] for j in keep])
        rss_r = restricted.rss
    else:
        rss_r = float(fit.y @ fit.y)
    return f_from_rss(rss_r, fit.rss, len(idx), fit.n - fit.k)


def t_stats(fit: OlsFit, se) -> tuple[np.ndarray, np.ndarray]:
    """t ratios and two-sided Student-t p-values with ``n - k`` dof."""
    se = np.asarray(se, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = fit.coef / se
    t = np.where((se == 0) & (fit.coef == 0), 0.0, t)
    p = 2.0 * stats.t.sf(np.abs(t), fit.n - fit.k)
    return t, p


def stars(p: float) -> str:
    if p is None or not np.isfinite(p):
        return ""
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""
