"""Named Monte Carlo experiments for the statistical modules.

Each trial function takes a seed and returns a :class:`~chainardl.synth.Trial`.
They are module-level (or partials of module-level functions) so they can
be shipped to worker processes.
"""

from __future__ import annotations

from functools import partial

import numpy as np
from scipy.signal import lfilter

from . import bounds as _bounds
from . import diagnostics as _diag
from .ardl import ArdlSpec, fit_ardl, to_ecm
from .frame import Frame
from .regress import ols_fit
from .synth import DgpParams, Experiment, Trial, generate, normals, rng_for
from .unitroot import adf_test, pp_test

LEVELS = (0.10, 0.05, 0.01)


def _unit_root_trial(seed: int, test: str, kind: str, n: int, rho: float = 0.0, ma: float = 0.0) -> Trial:
    if ma:
        rng = rng_for(seed)
        e = normals(rng, n + 1)
        u = e[1:] + ma * e[:-1]
        x = np.cumsum(u) if kind == "random_walk" else lfilter([1.0], [1.0, -rho], u)
    else:
        x = generate(DgpParams(kind, n, seed, {"rho": rho} if kind == "ar1" else {}))["y"]
    res = adf_test(x, "const") if test == "adf" else pp_test(x, "const")
    return Trial(res.stat, {lv: res.reject(lv) for lv in LEVELS})


def bounds_null_sample(seed: int, k: int, n: int) -> Frame:
    """Null of no levels relationship: y is a random walk independent of x.

    Each regressor is I(0) or I(1) with probability one half, drawn per
    replication, so the regressor mix ranges over the cases the bounds
    are meant to cover.
    """
    rng = rng_for(seed)
    y = np.cumsum(normals(rng, n))
    integrated = rng.integers(0, 2, size=k).astype(bool)
    cols = {"y": y}
    for j in range(k):
        e = normals(rng, n)
        cols[f"x{j + 1}"] = np.cumsum(e) if integrated[j] else e
    return Frame(np.arange(n, dtype=np.int64), cols)


def _bounds_trial(seed: int, case: str, k: int, n: int) -> Trial:
    frame = bounds_null_sample(seed, k, n)
    det = {"I": "none", "III": "const", "V": "const+trend"}[case]
    x = [f"x{j + 1}" for j in range(k)]
    ecm = to_ecm(fit_ardl(frame, "y", x, ArdlSpec(1, (1,) * k, det)))
    f = _bounds.bounds_f(ecm)
    tables = _bounds.default_tables()
    return Trial(f, {lv: f > tables[(case, k, lv)].f_upper for lv in LEVELS})


def _regression_sample(seed: int, n: int, error: str):
    """y = 1 + 0.5 x + u with x ~ N(0, 1) and u chosen by ``error``."""
    rng = rng_for(seed)
    x = normals(rng, n)
    e = normals(rng, n)
    mean = 1.0 + 0.5 * x
    if error == "iid":
        u = e
    elif error == "ar1":
        u = lfilter([1.0], [1.0, -0.6], e)
    elif error == "het":
        mean = 2.0 + x
        u = mean * e
    else:
        raise ValueError(error)
    X = np.column_stack([np.ones(n), x])
    return ols_fit(X, mean + u, ["const", "x"])


def _serial_trial(seed: int, test: str, error: str, n: int) -> Trial:
    fit = _regression_sample(seed, n, error)
    res = _diag.breusch_godfrey(fit, 1) if test == "bg" else _diag.durbin_alternative(fit, 1)
    return Trial(res.stat, {lv: res.p < lv for lv in LEVELS})


def _bp_trial(seed: int, error: str, n: int) -> Trial:
    res = _diag.breusch_pagan(_regression_sample(seed, n, error))
    return Trial(res.stat, {lv: res.p < lv for lv in LEVELS})


def _jb_trial(seed: int, dist: str, n: int) -> Trial:
    rng = rng_for(seed)
    z = normals(rng, n)
    if dist == "t3":
        chi = (normals(rng, 3 * n).reshape(n, 3) ** 2).sum(axis=1)
        z = z / np.sqrt(chi / 3.0)
    res = _diag.normality_test(z)
    return Trial(res.stat, {lv: res.p < lv for lv in LEVELS})


def _cusum_trial(seed: int, shift: float, n: int) -> Trial:
    rng = rng_for(seed)
    x = normals(rng, n)
    y = 1.0 + 0.5 * x + normals(rng, n)
    y[n // 2:] += shift
    X = np.column_stack([np.ones(n), x])
    flags = {}
    stat = np.nan
    for lv in LEVELS:
        res = _diag.cusum(X, y, level=lv)
        flags[lv] = not res.stable
        if lv == 0.05:
            stat = float(np.max(np.abs(res.path) / res.upper))
    return Trial(stat, flags)


def _registry() -> dict[str, Experiment]:
    exps = [
        Experiment("adf_size", partial(_unit_root_trial, test="adf", kind="random_walk", n=1000),
                   "ADF with constant on a random walk, n=1000"),
        Experiment("adf_power", partial(_unit_root_trial, test="adf", kind="ar1", n=1000, rho=0.5),
                   "ADF with constant on AR(1) rho=0.5, n=1000"),
        Experiment("pp_size", partial(_unit_root_trial, test="pp", kind="random_walk", n=1000, ma=0.5),
                   "PP with constant on a random walk with MA(1) theta=0.5 increments, n=1000"),
        Experiment("pp_power", partial(_unit_root_trial, test="pp", kind="ar1", n=1000, rho=0.5),
                   "PP with constant on AR(1) rho=0.5, n=1000"),
    ]
    for case in ("III", "V"):
        for k in (1, 5):
            exps.append(Experiment(f"bounds_null_{case}_k{k}", partial(_bounds_trial, case=case, k=k, n=1000),
                                   f"bounds F under no levels relationship, case {case}, k={k}, n=1000"))
    for test in ("bg", "durbin"):
        exps.append(Experiment(f"{test}_size", partial(_serial_trial, test=test, error="iid", n=500),
                               f"{test} order 1, iid errors, n=500"))
        exps.append(Experiment(f"{test}_power", partial(_serial_trial, test=test, error="ar1", n=500),
                               f"{test} order 1, AR(1) rho=0.6 errors, n=500"))
    exps += [
        Experiment("bp_size", partial(_bp_trial, error="iid", n=500), "Breusch-Pagan, homoscedastic, n=500"),
        Experiment("bp_power", partial(_bp_trial, error="het", n=500),
                   "Breusch-Pagan, error sd proportional to the mean, n=500"),
        Experiment("jb_size", partial(_jb_trial, dist="normal", n=1000), "Jarque-Bera on N(0,1), n=1000"),
        Experiment("jb_power", partial(_jb_trial, dist="t3", n=1000), "Jarque-Bera on t(3), n=1000"),
        Experiment("cusum_size", partial(_cusum_trial, shift=0.0, n=200), "CUSUM, constant parameters, n=200"),
        Experiment("cusum_power", partial(_cusum_trial, shift=5.0, n=200),
                   "CUSUM, intercept shift of 5 error sd at mid-sample, n=200"),
    ]
    return {e.name: e for e in exps}


EXPERIMENTS = _registry()


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; choose from {', '.join(sorted(EXPERIMENTS))}") from None


# ---------------------------------------------------------------------------
# Bounds critical values by simulation


def bounds_null_statistics(case: str, k: int, integrated: bool, n: int, reps: int,
                           base_seed: int) -> tuple[np.ndarray, np.ndarray]:
    """F and t statistics of the bounds regression under the null.

    ``dy`` is regressed on the case's deterministic terms, ``y_{t-1}`` and
    ``x_{t-1}``, with ``y`` a driftless random walk and ``x`` either k
    independent random walks (``integrated``) or k white-noise series.
    """
    det = {"I": "none", "III": "const", "V": "const+trend"}[case]
    f_out = np.empty(reps)
    t_out = np.empty(reps)
    t_index = np.arange(1, n, dtype=np.float64)
    det_cols = []
    if det != "none":
        det_cols.append(np.ones(n - 1))
    if det == "const+trend":
        det_cols.append(t_index)
    for i in range(reps):
        rng = rng_for(base_seed + i)
        e = normals(rng, n)
        y = np.cumsum(e)
        x = normals(rng, n * k).reshape(k, n)
        if integrated:
            x = np.cumsum(x, axis=1)
        dy = e[1:]
        X = np.column_stack([*det_cols, y[:-1], *x[:, :-1]])
        fit = ols_fit(X, dy)
        if det_cols:
            rss_r = ols_fit(np.column_stack(det_cols), dy).rss
        else:
            rss_r = float(dy @ dy)
        m = k + 1
        f_out[i] = ((rss_r - fit.rss) / m) / (fit.rss / fit.df_resid)
        j = len(det_cols)
        t_out[i] = fit.coef[j] / np.sqrt(fit.sigma2 * fit.xtx_inv[j, j])
    return f_out, t_out
