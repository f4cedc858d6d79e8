"""Synthetic stand-in for the provider exports used by the shipped config.

Three CSV files are produced, each in the dialect of its source:

* ``onchain.csv``: daily on-chain and exchange metrics, ISO dates;
* ``market.csv``: business-day rates, stock index and gold, ISO dates,
  upper-case provider headers;
* ``cpi.csv``: monthly CPI, ``DD.MM.YYYY`` dates.

BTC price error-corrects towards a linear combination of the stock index
and gold, so the levels relationship is present by construction.
"""

from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .synth import normals, rng_for

FIXTURE_SEED = 20191204
START = date(2019, 12, 4)
END = date(2024, 1, 25)
HALVING = date(2020, 5, 11)
FILES = ("onchain.csv", "market.csv", "cpi.csv")

# Levels relationship of the price DGP.
PRICE_ALPHA = -0.05
PRICE_WEIGHTS = {"will5000pr": 2.0, "gold_price": 8.0}
PRICE_INTERCEPT = -64000.0

ONCHAIN_COLUMNS = (
    "btc_price", "bank_netflow", "bank_inflow_top10", "bank_outflow_top10", "bank_reserve",
    "fund_volume", "exchange_netflow", "exchange_inflow_top10", "exchange_outflow_top10",
    "exchange_reserve", "tokens_transferred_total", "fund_flow_ratio", "coin_days_destroyed",
    "total_supply",
)
MARKET_COLUMNS = {"dff": "DFF", "dfii10": "DFII10", "will5000pr": "WILL5000PR", "gold_price": "GOLD"}


def _ar1(rng, n: int, rho: float, sd: float) -> np.ndarray:
    return lfilter([1.0], [1.0, -rho], sd * normals(rng, n))


def _ffill_business(values: np.ndarray, business: np.ndarray) -> np.ndarray:
    """Hold the last business-day value over non-business days."""
    idx = np.maximum.accumulate(np.where(business, np.arange(values.size), 0))
    return values[idx]


def _fmt(v: float, digits: int) -> str:
    return f"{v:.{digits}f}"


def simulate(seed: int = FIXTURE_SEED) -> dict:
    """Daily series on the full calendar plus the monthly CPI path."""
    rng = rng_for(seed)
    days = [START + timedelta(days=i) for i in range((END - START).days + 1)]
    n = len(days)
    business = np.array([d.weekday() < 5 for d in days])

    will = 33000.0 * np.exp(np.cumsum(0.0003 + 0.011 * normals(rng, n)))
    gold = 1470.0 * np.exp(np.cumsum(0.0002 + 0.008 * normals(rng, n)))
    dfii10 = 0.1 + np.cumsum(0.03 * normals(rng, n))
    steps = 0.25 * np.round(np.cumsum(0.02 * normals(rng, n)) / 0.25)
    dff = np.abs(1.55 + steps + 0.01 * normals(rng, n))
    will, gold, dfii10, dff = (_ffill_business(v, business) for v in (will, gold, dfii10, dff))

    target = PRICE_INTERCEPT + PRICE_WEIGHTS["will5000pr"] * will + PRICE_WEIGHTS["gold_price"] * gold
    shocks = 600.0 * normals(rng, n)
    price = np.empty(n)
    price[0] = target[0]
    for t in range(1, n):
        price[t] = price[t - 1] + PRICE_ALPHA * (price[t - 1] - target[t - 1]) + shocks[t]

    bank_netflow = _ar1(rng, n, 0.3, 50.0)
    exchange_netflow = _ar1(rng, n, 0.3, 3000.0)
    bank_in = 400.0 * np.exp(0.4 * normals(rng, n))
    bank_out = 400.0 * np.exp(0.4 * normals(rng, n))
    ex_in = 2000.0 * np.exp(0.4 * normals(rng, n))
    ex_out = 2000.0 * np.exp(0.4 * normals(rng, n))
    tokens = 3.0e5 * np.exp(0.2 * _ar1(rng, n, 0.5, 1.0))
    ffr = 10.0 + _ar1(rng, n, 0.7, 1.5)
    cdd = 1.5e7 * np.exp(0.5 * normals(rng, n))
    fund_volume = 1.0e8 * np.exp(_ar1(rng, n, 0.8, 0.3))
    reward = np.where(np.array([d >= HALVING for d in days]), 6.25, 12.5)
    supply = 18.08e6 + np.cumsum(rng.poisson(144, n) * reward)

    months = []
    m = date(2019, 11, 1)
    while m <= END:
        months.append(m)
        m = date(m.year + (m.month == 12), m.month % 12 + 1, 1)
    cpi = 257.0 * np.exp(np.cumsum(0.003 + 0.002 * normals(rng, len(months))))

    return {
        "days": days, "business": business, "months": months, "cpi": cpi,
        "btc_price": price, "bank_netflow": bank_netflow,
        "bank_inflow_top10": bank_in, "bank_outflow_top10": bank_out,
        "bank_reserve": 20000.0 + np.cumsum(bank_netflow),
        "fund_volume": fund_volume, "exchange_netflow": exchange_netflow,
        "exchange_inflow_top10": ex_in, "exchange_outflow_top10": ex_out,
        "exchange_reserve": 2.5e6 + np.cumsum(exchange_netflow),
        "tokens_transferred_total": tokens, "fund_flow_ratio": ffr,
        "coin_days_destroyed": cdd, "total_supply": supply,
        "dff": dff, "dfii10": dfii10, "will5000pr": will, "gold_price": gold,
    }


def make_fixture(seed: int = FIXTURE_SEED) -> dict[str, str]:
    """CSV text of each fixture file, keyed by file name."""
    s = simulate(seed)
    lines = ["date," + ",".join(ONCHAIN_COLUMNS)]
    for i, d in enumerate(s["days"]):
        lines.append(d.isoformat() + "," + ",".join(_fmt(s[c][i], 4) for c in ONCHAIN_COLUMNS))
    onchain = "\n".join(lines) + "\n"

    lines = ["date," + ",".join(MARKET_COLUMNS.values())]
    for i, d in enumerate(s["days"]):
        if s["business"][i]:
            lines.append(d.isoformat() + "," + ",".join(_fmt(s[c][i], 4) for c in MARKET_COLUMNS))
    market = "\n".join(lines) + "\n"

    lines = ["date,CPIAUCSL"]
    for m, v in zip(s["months"], s["cpi"]):
        lines.append(f"{m.day:02d}.{m.month:02d}.{m.year},{v:.3f}")
    cpi = "\n".join(lines) + "\n"
    return {"onchain.csv": onchain, "market.csv": market, "cpi.csv": cpi}


def write_fixture(directory, seed: int = FIXTURE_SEED) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in make_fixture(seed).items():
        path = directory / name
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths
