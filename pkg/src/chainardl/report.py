"""Rendering of coefficient tables and per-model result blocks.

Coefficient cells read ``"0.112 *"``: three decimals, then the stars
separated by one space. Variables a model does not contain get an empty
cell. The JSON style keeps values unrounded and the stars in their own
field.
"""

from __future__ import annotations

import json
import math
from typing import Literal, Mapping, Sequence

from .ardl import ReportRow
from .presets import EXOG_ORDER, VARIABLE_ORDER

Style = Literal["text", "markdown", "json"]
EC_HEADER = "Error correction term"


def format_value(value: float) -> str:
    if value is None or not math.isfinite(value):
        return "n/a"
    text = f"{value:.3f}"
    # a sign on a value that rounds to zero is noise
    return "0.000" if text == "-0.000" else text


def format_cell(row: ReportRow | None) -> str:
    if row is None:
        return ""
    text = format_value(row.value)
    return f"{text} {row.stars}" if row.stars else text


def _rank(row: ReportRow) -> tuple:
    order = VARIABLE_ORDER + EXOG_ORDER
    var_rank = order.index(row.variable) if row.variable in order else len(order)
    return (row.section, var_rank, row.variable, row.lag)


def collect_rows(columns: Mapping[str, Sequence[ReportRow]]) -> list[tuple[str, str, int]]:
    """Union of row keys across models, as (key, label, section), in display order."""
    seen: dict[str, ReportRow] = {}
    for rows in columns.values():
        for r in rows:
            seen.setdefault(r.key, r)
    ordered = sorted(seen.values(), key=_rank)
    return [(r.key, r.label, r.section) for r in ordered]


def _json_number(v: float):
    return v if v is not None and math.isfinite(v) else None


def render_table(columns: Mapping[str, Sequence[ReportRow]], style: Style = "text", title: str = "") -> bytes:
    """Render one table with a column per model id, in mapping order."""
    ids = list(columns)
    index = {m: {r.key: r for r in rows} for m, rows in columns.items()}
    layout = collect_rows(columns)

    if style == "json":
        out = {"title": title, "columns": ids, "rows": []}
        for key, label, section in layout:
            cells = {}
            for m in ids:
                r = index[m].get(key)
                cells[m] = None if r is None else {
                    "value": _json_number(r.value), "se": _json_number(r.se),
                    "p": _json_number(r.p), "stars": r.stars,
                }
            out["rows"].append({"key": key, "label": label, "section": section, "cells": cells})
        return (json.dumps(out, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")

    body: list[list[str]] = []
    ec_done = False
    for key, label, section in layout:
        if section == 1 and not ec_done:
            body.append([EC_HEADER] + [""] * len(ids))
            ec_done = True
        body.append([label] + [format_cell(index[m].get(key)) for m in ids])
    header = [""] + ids

    if style == "markdown":
        lines = [f"**{title}**", ""] if title else []
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join([":---"] + ["---:"] * len(ids)) + "|")
        for row in body:
            lines.append("| " + " | ".join(row) + " |")
        return ("\n".join(lines) + "\n").encode("utf-8")

    if style != "text":
        raise ValueError(f"unknown table style {style!r}")
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = [title] if title else []
    for row in [header, *body]:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Blocks


_fmt = format_value


def unit_root_table(verdicts) -> str:
    """Series x (ADF/PP level, ADF/PP difference, verdict)."""
    header = ["Series", "ADF level", "PP level", "ADF diff", "PP diff", "Order"]
    rows = [header]
    for v in verdicts:
        rows.append([
            v.series_name,
            f"{_fmt(v.adf_level.stat)} ({v.adf_level.lags_or_bandwidth})",
            f"{_fmt(v.pp_level.stat)} ({v.pp_level.lags_or_bandwidth})",
            f"{_fmt(v.adf_diff.stat)} ({v.adf_diff.lags_or_bandwidth})" if v.adf_diff else "",
            f"{_fmt(v.pp_diff.stat)} ({v.pp_diff.lags_or_bandwidth})" if v.pp_diff else "",
            v.order,
        ])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    notes = [n for v in verdicts for n in v.notes]
    lines.append("")
    lines.append("Lag order (ADF) or bandwidth (PP) in parentheses; 5% level.")
    lines.extend(f"Note: {n}" for n in notes)
    return "\n".join(lines) + "\n"


def bounds_block(model_id: str, res) -> str:
    cv = res.bounds
    t_bounds = f"[{cv.t_lower:.2f}, {cv.t_upper:.2f}]" if cv.has_t else "n/a"
    return "\n".join([
        f"{model_id}: case {res.case}, k = {res.k}, level {res.level:g}",
        f"  F = {_fmt(res.f_stat)}  bounds [{cv.f_lower:.2f}, {cv.f_upper:.2f}]  ({res.f_band})",
        f"  t = {_fmt(res.t_stat)}  bounds {t_bounds}  ({res.t_band})",
        f"  critical values: {cv.source}",
        f"  decision: {res.decision.value}",
    ]) + "\n"


def diagnostics_block(model_id: str, rep) -> str:
    lines = [f"{model_id}:"]
    for order, r in rep.bg_lm.items():
        lines.append(f"  Breusch-Godfrey LM, order {order}: chi2({r.dof}) = {_fmt(r.stat)}, p = {_fmt(r.p)}")
    for order, r in rep.durbin_alt.items():
        d1, d2 = r.dof
        lines.append(f"  Durbin alternative, order {order}: F({d1}, {d2}) = {_fmt(r.stat)}, p = {_fmt(r.p)}")
    bp = rep.breusch_pagan
    lines.append(f"  Breusch-Pagan/Cook-Weisberg: chi2(1) = {_fmt(bp.stat)}, p = {_fmt(bp.p)}")
    jb = rep.normality
    lines.append(f"  Jarque-Bera normality: chi2(2) = {_fmt(jb.stat)}, p = {_fmt(jb.p)}")
    if rep.cusum is None:
        lines.append(f"  CUSUM: not computed ({rep.cusum_error})")
    else:
        c = rep.cusum
        verdict = "stable" if c.stable else "unstable"
        lines.append(f"  CUSUM (5%): {verdict}, {c.path.size} recursive residuals from row {c.start}")
    return "\n".join(lines) + "\n"
