"""Data-generating processes and the Monte Carlo harness."""

from __future__ import annotations

import csv

import numpy as np
import pytest

from chainardl.errors import MonteCarloError
from chainardl.experiments import EXPERIMENTS, get_experiment
from chainardl.synth import (DgpParams, Experiment, Trial, generate, monte_carlo, normals,
                             replication_seeds, rng_for, write_summaries)


def _coin(seed: int) -> Trial:
    u = normals(rng_for(seed), 1)[0]
    return Trial(u, {0.10: abs(u) > 1.645, 0.05: abs(u) > 1.96, 0.01: abs(u) > 2.576})


def _flaky(seed: int) -> Trial:
    from chainardl.errors import EstimationError
    if seed % 10 == 0:
        raise EstimationError("boom")
    return _coin(seed)


def _rare_failure(seed: int) -> Trial:
    from chainardl.errors import EstimationError
    if seed % 50 == 0:
        raise EstimationError("boom")
    return _coin(seed)


class TestGenerate:
    def test_reproducible(self):
        p = DgpParams("ardl_cointegrated", 300, 99, {"phi": [0.6], "beta": [[0.2, 0.1]]})
        a, b = generate(p), generate(p)
        for c in a.names:
            assert a[c].tobytes() == b[c].tobytes()

    def test_ar1_zero_is_white_noise(self):
        a = generate(DgpParams("ar1", 500, 5, {"rho": 0.0}))["y"]
        b = generate(DgpParams("white_noise", 500, 5))["y"]
        assert a.tobytes() == b.tobytes()

    def test_white_noise_sd(self):
        y = generate(DgpParams("white_noise", 100_000, 1))["y"]
        assert abs(np.std(y, ddof=1) - 1.0) < 0.02

    def test_noise_sd_scales(self):
        a = generate(DgpParams("random_walk", 100, 7))["y"]
        b = generate(DgpParams("random_walk", 100, 7, noise_sd=3.0))["y"]
        np.testing.assert_allclose(b, 3.0 * a)

    def test_double_integrated(self):
        y = generate(DgpParams("double_integrated", 100, 7))["y"]
        w = generate(DgpParams("random_walk", 100, 7))["y"]
        np.testing.assert_allclose(np.diff(y), w[1:])

    def test_implied_parameters(self):
        p = DgpParams("ardl_cointegrated", 10, 0, {"phi": [0.9], "beta": [[0.2]]})
        assert p.implied_theta[0] == pytest.approx(2.0)
        assert p.implied_alpha == pytest.approx(-0.1)

    @pytest.mark.parametrize("kwargs", [
        dict(kind="ar2", n=10, seed=0),
        dict(kind="ar1", n=10, seed=0, coeffs={"rho": 1.0}),
        dict(kind="white_noise", n=1, seed=0),
        dict(kind="white_noise", n=10, seed=-1),
        dict(kind="white_noise", n=10, seed=2**64),
        dict(kind="white_noise", n=10, seed=0, noise_sd=0.0),
        dict(kind="ardl_cointegrated", n=10, seed=0, coeffs={"phi": [0.6, 0.5], "beta": [[1.0]]}),
        dict(kind="ardl_cointegrated", n=10, seed=0, coeffs={"phi": [0.5]}),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            DgpParams(**kwargs)

    def test_normals_are_standard(self):
        z = normals(rng_for(3), 200_000)
        assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01
        assert np.all(np.isfinite(z))

    def test_distinct_streams(self):
        a, b = normals(rng_for(1), 1000), normals(rng_for(2), 1000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


class TestMonteCarlo:
    def test_seeds_distinct(self):
        seeds = replication_seeds(2**64 - 50, 100)
        assert len(set(seeds)) == 100 and seeds[0] == 2**64 - 50 and seeds[50] == 0

    def test_min_reps(self):
        with pytest.raises(ValueError):
            monte_carlo(Experiment("c", _coin), 99)

    def test_rates_and_quantiles(self):
        s = monte_carlo(Experiment("c", _coin), 4000, 10)
        assert abs(s.rates[0.05] - 0.05) < 0.015
        assert s.quantiles[0.5] == pytest.approx(0.0, abs=0.1)
        assert s.failures == 0

    def test_deterministic(self):
        a = monte_carlo(Experiment("c", _coin), 200, 3)
        b = monte_carlo(Experiment("c", _coin), 200, 3)
        assert a.rates == b.rates and a.stats.tobytes() == b.stats.tobytes()

    def test_parallel_equals_serial(self):
        a = monte_carlo(Experiment("c", _coin), 300, 8)
        b = monte_carlo(Experiment("c", _coin), 300, 8, n_jobs=2)
        assert a.rates == b.rates and a.stats.tobytes() == b.stats.tobytes()

    def test_failures_counted(self):
        s = monte_carlo(Experiment("r", _rare_failure), 500)
        assert s.failures == 10 and s.stats.size == 490

    def test_too_many_failures(self):
        with pytest.raises(MonteCarloError):
            monte_carlo(Experiment("f", _flaky), 200)

    def test_csv(self, tmp_path):
        s = monte_carlo(Experiment("c", _coin), 100, 42)
        path = tmp_path / "mc.csv"
        write_summaries([s], path)
        rows = list(csv.DictReader(path.open()))
        assert [r["level"] for r in rows] == ["0.10", "0.05", "0.01"]
        assert rows[1]["experiment"] == "c" and rows[1]["reps"] == "100" and rows[1]["seed"] == "42"
        assert float(rows[1]["rate"]) == s.rates[0.05]


def test_registry():
    assert {"adf_size", "adf_power", "bounds_null_III_k1", "bg_power", "cusum_size"} <= set(EXPERIMENTS)
    with pytest.raises(KeyError, match="adf_size"):
        get_experiment("nope")


def test_cusum_experiment_smoke():
    s = monte_carlo(get_experiment("cusum_power"), 100, 0)
    assert s.rates[0.05] >= 0.9
