"""Synthetic data-generating processes and a reproducible Monte Carlo harness.

Every draw comes from a Philox counter-based generator keyed directly by a
64-bit seed, so replication ``i`` of an experiment depends only on
``base_seed + i`` and the replications can run in any order or in
parallel.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.signal import lfilter
from scipy.special import ndtri

from .errors import ChainArdlError, MonteCarloError
from .frame import Frame, to_day

KINDS = ("white_noise", "ar1", "random_walk", "double_integrated", "ardl_cointegrated")
SEED_MASK = (1 << 64) - 1
DEFAULT_START = date(2000, 1, 1)
BURN_IN = 200


def rng_for(seed: int) -> np.random.Generator:
    """Philox generator keyed by ``seed`` (taken modulo 2**64)."""
    return np.random.Generator(np.random.Philox(key=int(seed) & SEED_MASK))


def normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """Standard normals by inverse CDF of 53-bit uniforms on the open unit interval."""
    k = rng.integers(0, 1 << 53, size=n, dtype=np.uint64)
    return ndtri((k.astype(np.float64) + 0.5) * 2.0**-53)


@dataclass(frozen=True)
class DgpParams:
    """Parameters of one synthetic draw.

    ``coeffs`` by kind:

    * ``ar1``: ``rho``
    * ``ardl_cointegrated``: ``phi`` (sequence), ``beta`` (one sequence of
      lag coefficients per regressor), optional ``const`` and ``x_sd``
    """

    kind: str
    n: int
    seed: int
    coeffs: Mapping = field(default_factory=dict)
    noise_sd: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown DGP kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not self.noise_sd > 0:
            raise ValueError("noise_sd must be positive")
        if not 0 <= int(self.seed) <= SEED_MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind == "ar1" and not abs(float(self.coeffs.get("rho", 0.0))) < 1:
            raise ValueError("ar1 requires |rho| < 1")
        if self.kind == "ardl_cointegrated":
            phi = np.atleast_1d(np.asarray(self.coeffs.get("phi", ()), dtype=float))
            beta = self.coeffs.get("beta", ())
            if phi.size < 1 or not len(beta):
                raise ValueError("ardl_cointegrated requires phi and beta")
            if not phi.sum() < 1:
                raise ValueError("ardl_cointegrated requires sum(phi) < 1")

    @property
    def implied_theta(self) -> np.ndarray:
        phi = np.atleast_1d(np.asarray(self.coeffs["phi"], dtype=float))
        return np.array([np.sum(np.atleast_1d(b)) for b in self.coeffs["beta"]]) / (1.0 - phi.sum())

    @property
    def implied_alpha(self) -> float:
        phi = np.atleast_1d(np.asarray(self.coeffs["phi"], dtype=float))
        return -(1.0 - float(phi.sum()))


def _frame(columns: Mapping[str, np.ndarray], n: int, kind: str) -> Frame:
    start = to_day(DEFAULT_START)
    return Frame(np.arange(start, start + n), columns, {c: f"synthetic:{kind}" for c in columns})


def generate(params: DgpParams) -> Frame:
    rng = rng_for(params.seed)
    n, sd = params.n, params.noise_sd
    if params.kind == "white_noise":
        return _frame({"y": sd * normals(rng, n)}, n, params.kind)
    if params.kind == "ar1":
        rho = float(params.coeffs.get("rho", 0.0))
        e = sd * normals(rng, n)
        return _frame({"y": lfilter([1.0], [1.0, -rho], e)}, n, params.kind)
    if params.kind == "random_walk":
        return _frame({"y": np.cumsum(sd * normals(rng, n))}, n, params.kind)
    if params.kind == "double_integrated":
        return _frame({"y": np.cumsum(np.cumsum(sd * normals(rng, n)))}, n, params.kind)
    return _frame(_ardl_cointegrated(params, rng), n, params.kind)


def _ardl_cointegrated(params: DgpParams, rng: np.random.Generator) -> dict[str, np.ndarray]:
    c = params.coeffs
    phi = np.atleast_1d(np.asarray(c["phi"], dtype=float))
    betas = [np.atleast_1d(np.asarray(b, dtype=float)) for b in c["beta"]]
    const = float(c.get("const", 0.0))
    x_sd = float(c.get("x_sd", 1.0))
    total = params.n + BURN_IN
    e = params.noise_sd * normals(rng, total)
    xs = [np.cumsum(x_sd * normals(rng, total)) for _ in betas]
    drive = np.full(total, const) + e
    for x, b in zip(xs, betas):
        drive += lfilter(b, [1.0], x)
    # start at the long-run level implied by the constant
    y0 = const / (1.0 - phi.sum())
    zi = y0 * np.cumsum(phi[::-1])[::-1]
    y = lfilter([1.0], np.concatenate(([1.0], -phi)), drive, zi=zi)[0]
    cols = {"y": y[BURN_IN:]}
    for j, x in enumerate(xs, start=1):
        cols[f"x{j}"] = x[BURN_IN:]
    return cols


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class Trial:
    """Outcome of one replication: a statistic and rejection flags per level."""

    stat: float
    reject: Mapping[float, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Experiment:
    """A named replication function ``trial(seed) -> Trial``.

    The function must be picklable (module-level) for parallel runs.
    """

    name: str
    trial: Callable[[int], Trial]
    description: str = ""


MC_LEVELS = (0.10, 0.05, 0.01)
MC_QUANTILES = (0.01, 0.05, 0.10, 0.50, 0.90, 0.95, 0.99)
MAX_FAILURE_SHARE = 0.05


@dataclass(frozen=True)
class MonteCarloSummary:
    experiment: str
    reps: int
    base_seed: int
    failures: int
    rates: dict[float, float]
    quantiles: dict[float, float]
    stats: np.ndarray = field(repr=False)

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.stats, q))


def _run_chunk(trial: Callable[[int], Trial], seeds: Sequence[int]):
    out = []
    for s in seeds:
        try:
            out.append(trial(s))
        except (ChainArdlError, np.linalg.LinAlgError):
            out.append(None)
    return out


def replication_seeds(base_seed: int, reps: int) -> list[int]:
    seeds = [(int(base_seed) + i) & SEED_MASK for i in range(reps)]
    if len(set(seeds)) != reps:
        raise MonteCarloError("replication seeds are not distinct")
    return seeds


def monte_carlo(experiment: Experiment, reps: int, base_seed: int = 0, n_jobs: int = 1) -> MonteCarloSummary:
    """Run ``reps`` replications with seeds ``base_seed + i``.

    Failed replications are counted; more than 5% failures raise
    MonteCarloError. Results do not depend on ``n_jobs``.
    """
    if reps < 100:
        raise ValueError("at least 100 replications are required")
    seeds = replication_seeds(base_seed, reps)
    if n_jobs == 1:
        trials = _run_chunk(experiment.trial, seeds)
    else:
        chunk = math.ceil(reps / (4 * n_jobs))
        parts = [seeds[i: i + chunk] for i in range(0, reps, chunk)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            trials = [t for part in pool.map(_run_chunk, [experiment.trial] * len(parts), parts) for t in part]
    ok = [t for t in trials if t is not None]
    failures = reps - len(ok)
    if failures > MAX_FAILURE_SHARE * reps:
        raise MonteCarloError(f"{experiment.name}: {failures} of {reps} replications failed")
    stat_values = np.array([t.stat for t in ok], dtype=float)
    rates = {}
    for level in MC_LEVELS:
        flags = [t.reject[level] for t in ok if level in t.reject]
        rates[level] = float(np.mean(flags)) if flags else float("nan")
    finite = stat_values[np.isfinite(stat_values)]
    quantiles = {q: float(np.quantile(finite, q)) for q in MC_QUANTILES} if finite.size else {}
    return MonteCarloSummary(experiment.name, reps, int(base_seed), failures, rates, quantiles, stat_values)


def write_summaries(summaries: Sequence[MonteCarloSummary], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["experiment", "level", "rate", "reps", "seed"])
        for s in summaries:
            for level in MC_LEVELS:
                w.writerow([s.experiment, f"{level:.2f}", repr(s.rates[level]), s.reps, s.base_seed])
