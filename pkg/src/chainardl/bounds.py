"""Bounds test for a levels relationship.

The F statistic tests that the lagged-levels block of the error-correction
regression (``y_{t-1}`` and every regressor's levels term) is zero; the t
statistic is the classical t ratio on ``y_{t-1}``. Both are compared with
the asymptotic bounds of Pesaran, Shin and Smith (2001): the lower bound
assumes all regressors are I(0), the upper bound that all are I(1).
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from .ardl import EcmFit
from .errors import ConfigError
from .regress import f_from_rss, ols_fit

CASES = ("I", "II", "III", "IV", "V")
TABLE_LEVELS = (0.10, 0.05, 0.025, 0.01)

CRITICAL_VALUES_FILE = "pss_critical_values.csv"
CRITICAL_VALUES_SHA256 = "5058bab20a750a7b94240c300f44f123420c44bf55ce87af59d0c74bfdc2e55f"
# Cases I, III and V at k = 11, 12 from scripts/make_bounds_extension.py.
EXTENSION_FILE = "bounds_extension_simulated.csv"
EXTENSION_SHA256 = "c8e3af572321b3dd48fea217686f84f64908546888ed024d6ff3055bdbb4f733"


class Decision(str, Enum):
    REJECT = "Reject"
    INCONCLUSIVE = "Inconclusive"
    FAIL_TO_REJECT = "FailToReject"


@dataclass(frozen=True)
class CriticalValueTable:
    case: str
    k: int
    level: float
    f_lower: float
    f_upper: float
    t_lower: float
    t_upper: float
    source: str = "PSS (2001)"

    @property
    def has_t(self) -> bool:
        return not (np.isnan(self.t_lower) or np.isnan(self.t_upper))


CriticalValues = Mapping[tuple[str, int, float], CriticalValueTable]


def _read_table(text: str, source: str = "PSS (2001)") -> dict[tuple[str, int, float], CriticalValueTable]:
    out = {}
    for row in csv.DictReader(text.splitlines()):
        t_lo = float(row["t_lower"]) if row["t_lower"] else np.nan
        t_hi = float(row["t_upper"]) if row["t_upper"] else np.nan
        entry = CriticalValueTable(row["case"], int(row["k"]), float(row["level"]),
                                   float(row["f_lower"]), float(row["f_upper"]), t_lo, t_hi, source)
        out[(entry.case, entry.k, entry.level)] = entry
    return out


def _bundled(name: str, sha256: str) -> str:
    data = resources.files("chainardl").joinpath("data", name).read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if digest != sha256:
        raise ConfigError(f"bundled file {name} checksum mismatch ({digest})")
    return data.decode("utf-8")


def load_critical_values(path=None) -> dict[tuple[str, int, float], CriticalValueTable]:
    """Read a critical-value CSV; the bundled file is checksum-verified."""
    if path is None:
        return _read_table(_bundled(CRITICAL_VALUES_FILE, CRITICAL_VALUES_SHA256))
    return _read_table(Path(path).read_text(encoding="utf-8"), f"file {Path(path).name}")


def load_extension() -> dict[tuple[str, int, float], CriticalValueTable]:
    """Simulated entries for k beyond the published table."""
    return _read_table(_bundled(EXTENSION_FILE, EXTENSION_SHA256), "simulated (n=1000, 20000 reps)")


_DEFAULT_TABLES: dict | None = None


def default_tables():
    """Published table, completed by simulated entries where it has none."""
    global _DEFAULT_TABLES
    if _DEFAULT_TABLES is None:
        tables = load_extension()
        tables.update(load_critical_values())
        _DEFAULT_TABLES = tables
    return _DEFAULT_TABLES


def case_for(det: str) -> str:
    """Deterministic case implied by the model: unrestricted terms only."""
    return {"none": "I", "const": "III", "const+trend": "V"}[det]


def bounds_f(ecm: EcmFit) -> float:
    """Wald F on the lagged-levels block, from restricted and unrestricted RSS."""
    ols = ecm.ols
    drop = set(ecm.level_index)
    keep = [j for j in range(ols.k) if j not in drop]
    if keep:
        rss_r = ols_fit(ols.X[:, keep], ols.y, [ols.regressor_names[j] for j in keep]).rss
    else:
        rss_r = float(ols.y @ ols.y)
    return f_from_rss(rss_r, ols.rss, len(drop), ols.df_resid).F


def bounds_t(ecm: EcmFit) -> float:
    """Classical t ratio on the ``y_{t-1}`` coefficient."""
    ols = ecm.ols
    j = ecm.level_index[0]
    se = np.sqrt(ols.sigma2 * ols.xtx_inv[j, j])
    if se == 0:
        return float(-np.inf if ols.coef[j] < 0 else (np.inf if ols.coef[j] > 0 else 0.0))
    return float(ols.coef[j] / se)


def _band(stat: float, lower: float, upper: float, *, negative: bool = False) -> str:
    """Position of a statistic relative to its bounds; t bounds are negative."""
    if negative:
        stat, lower, upper = -stat, -lower, -upper
    if stat < lower:
        return "below lower"
    if stat > upper:
        return "beyond upper"
    return "between"


@dataclass(frozen=True)
class BoundsResult:
    f_stat: float
    t_stat: float
    k: int
    case: str
    level: float
    decision: Decision
    bounds: CriticalValueTable
    f_band: str
    t_band: str


def bounds_decision(f: float, t: float, k: int, case: str, level: float,
                    tables: CriticalValues | None = None) -> BoundsResult:
    """Three-way decision.

    Reject when F exceeds the upper bound and t lies beyond the upper t
    bound; FailToReject when F is below the lower bound; otherwise
    Inconclusive. Cases without t bounds (II and IV) decide on F alone.
    """
    tables = default_tables() if tables is None else tables
    key = (case, int(k), float(level))
    if key not in tables:
        raise ConfigError(f"no critical values for case {case}, k={k}, level={level}")
    cv = tables[key]
    f_band = _band(f, cv.f_lower, cv.f_upper)
    if cv.has_t:
        t_band = _band(t, cv.t_lower, cv.t_upper, negative=True)
        t_beyond = t < cv.t_upper
    else:
        t_band, t_beyond = "n/a", True
    if f > cv.f_upper and t_beyond:
        decision = Decision.REJECT
    elif f < cv.f_lower:
        decision = Decision.FAIL_TO_REJECT
    else:
        decision = Decision.INCONCLUSIVE
    return BoundsResult(float(f), float(t), int(k), case, float(level), decision, cv, f_band, t_band)


def bounds_test(ecm: EcmFit, level: float = 0.05, tables: CriticalValues | None = None) -> BoundsResult:
    return bounds_decision(bounds_f(ecm), bounds_t(ecm), len(ecm.x), case_for(ecm.spec.det), level, tables)
