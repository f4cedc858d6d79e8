"""The ten shipped model specifications, in two dummy variants.

Every model explains ``btc_price`` and carries the macro-financial block.
``total_supply`` enters as an exogenous level wherever it is used, so it
has no long-run coefficient. Deterministic terms follow the Trend and
Const rows of the short-run tables: a blank Const cell means the model has
no intercept.

Notes on table discrepancies, kept as found:

* M7 carries no on-chain transactions term; its long-run and short-run
  tables agree on that.
* ``Δ DFF`` shows up only for M10 in the one-dummy short-run table. That
  row is an outcome of lag selection, not a specification difference, so
  no preset changes.
"""

from __future__ import annotations

from dataclasses import dataclass

DEPENDENT = "btc_price"
DUMMY_SETS = ("two_dummy", "one_dummy")

MACRO = ("dff", "dfii10", "cpiaucsl", "will5000pr", "gold_price")

# Canonical row order of the report tables.
VARIABLE_ORDER = (
    "bank_netflow", "bank_reserve", "bank_whale_netflow", "fund_volume",
    "exchange_netflow", "exchange_reserve", "exchange_whale_netflow",
    "on_chain_btc_transactions", "coin_days_destroyed", *MACRO,
)
EXOG_ORDER = ("total_supply", "dummy1", "dummy2", "timedummy1", "timedummy2", "dummy3", "timedummy3")

DUMMIES = {
    "two_dummy": ("dummy1", "dummy2", "timedummy1", "timedummy2"),
    "one_dummy": ("dummy3", "timedummy3"),
}

_ENDOGENOUS = {
    "M1": ("bank_netflow", "exchange_netflow", "on_chain_btc_transactions", "coin_days_destroyed"),
    "M2": ("bank_reserve", "exchange_reserve", "on_chain_btc_transactions", "coin_days_destroyed"),
    "M3": ("bank_netflow", "fund_volume", "exchange_netflow", "on_chain_btc_transactions",
           "coin_days_destroyed"),
    "M4": ("bank_netflow", "bank_whale_netflow", "exchange_netflow", "exchange_whale_netflow",
           "on_chain_btc_transactions", "coin_days_destroyed"),
    "M5": ("bank_netflow", "bank_whale_netflow", "fund_volume", "exchange_netflow",
           "exchange_whale_netflow", "on_chain_btc_transactions", "coin_days_destroyed"),
    "M6": ("bank_whale_netflow", "bank_reserve", "fund_volume", "exchange_reserve",
           "exchange_whale_netflow", "on_chain_btc_transactions", "coin_days_destroyed"),
    "M7": ("bank_whale_netflow", "exchange_whale_netflow", "coin_days_destroyed"),
    "M8": ("bank_netflow", "fund_volume", "exchange_netflow"),
    "M9": ("bank_reserve", "fund_volume", "exchange_reserve"),
    "M10": ("on_chain_btc_transactions", "coin_days_destroyed"),
}
_WITH_SUPPLY = ("M1", "M2", "M3", "M4", "M5", "M6", "M7", "M10")

_DET = {
    "two_dummy": {**{m: "const+trend" for m in ("M1", "M2", "M3", "M4", "M5", "M6", "M10")},
                  **{m: "none" for m in ("M7", "M8", "M9")}},
    "one_dummy": {**{m: "const+trend" for m in ("M2", "M3", "M4", "M5", "M6", "M7", "M10")},
                  "M1": "const", "M8": "none", "M9": "none"},
}

PRESET_IDS = tuple(_ENDOGENOUS)


@dataclass(frozen=True)
class ModelSpec:
    id: str
    endogenous: tuple[str, ...]
    exogenous: tuple[str, ...] = ()
    det: str = "const"
    dummy_set: str = "two_dummy"
    dependent: str = DEPENDENT

    def __post_init__(self):
        object.__setattr__(self, "endogenous", tuple(self.endogenous))
        object.__setattr__(self, "exogenous", tuple(self.exogenous))
        if not self.endogenous:
            raise ValueError(f"model {self.id}: endogenous list is empty")
        if self.dummy_set not in DUMMY_SETS:
            raise ValueError(f"model {self.id}: unknown dummy set {self.dummy_set!r}")
        names = (self.dependent, *self.endogenous, *self.exogenous)
        if len(set(names)) != len(names):
            raise ValueError(f"model {self.id}: a variable is listed twice")


def preset(model_id: str, dummy_set: str = "two_dummy") -> ModelSpec:
    if model_id not in _ENDOGENOUS:
        raise KeyError(f"unknown preset {model_id!r}")
    if dummy_set not in DUMMY_SETS:
        raise KeyError(f"unknown dummy set {dummy_set!r}")
    exog = (("total_supply",) if model_id in _WITH_SUPPLY else ()) + DUMMIES[dummy_set]
    return ModelSpec(model_id, _ENDOGENOUS[model_id] + MACRO, exog, _DET[dummy_set][model_id], dummy_set)


def all_presets(dummy_set: str = "two_dummy") -> list[ModelSpec]:
    return [preset(m, dummy_set) for m in PRESET_IDS]
