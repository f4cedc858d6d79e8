"""Incidence matrix of the ten model specifications, transcribed by hand.

Macro-financial controls are common to all models and listed separately.
"""

OFF_AND_ON_CHAIN = {
    "bank_netflow":              {"M1", "M3", "M4", "M5", "M8"},
    "bank_whale_netflow":        {"M4", "M5", "M6", "M7"},
    "bank_reserve":              {"M2", "M6", "M9"},
    "fund_volume":               {"M3", "M5", "M6", "M8", "M9"},
    "exchange_netflow":          {"M1", "M3", "M4", "M5", "M8"},
    "exchange_whale_netflow":    {"M4", "M5", "M6", "M7"},
    "exchange_reserve":          {"M2", "M6", "M9"},
    "on_chain_btc_transactions": {"M1", "M2", "M3", "M4", "M5", "M6", "M10"},
    "total_supply":              {"M1", "M2", "M3", "M4", "M5", "M6", "M7", "M10"},
    "coin_days_destroyed":       {"M1", "M2", "M3", "M4", "M5", "M6", "M7", "M10"},
}
MACRO = ("dff", "dfii10", "cpiaucsl", "will5000pr", "gold_price")
MODELS = tuple(f"M{i}" for i in range(1, 11))


def variables(model: str) -> set[str]:
    return {v for v, ms in OFF_AND_ON_CHAIN.items() if model in ms} | set(MACRO)
