"""Config-driven end-to-end run.

Order of work per model: integration screening of the dependent and
endogenous series, AIC lag selection, levels fit and error-correction form,
bounds test, diagnostics, report rows. A model whose bounds test fails to
reject is re-estimated in first differences without a levels term. A model
that uses an I(2) series is aborted and the series is named.

Exogenous terms (total supply, dummies) are not screened: they enter as
unrestricted levels and carry no long-run coefficient.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from . import report
from .ardl import (ArdlFit, EcmFit, ReportRow, difference_rows, fit_ardl, fit_difference,
                   long_run_table, select_lags, short_run_table, to_ecm)
from .bounds import TABLE_LEVELS, BoundsResult, Decision, bounds_test
from .diagnostics import DiagnosticsReport, run_diagnostics
from .errors import (ChainArdlError, ConfigError, DataError, EstimationError,
                     IntegrationOrderError)
from .frame import (FILL_POLICIES, STANDARD_RECIPES, Frame, align_daily, construct_variables,
                    descriptive_stats, format_stats, from_day, load_csv, parse_date, stats_records)
from .presets import DUMMY_SETS, EXOG_ORDER, PRESET_IDS, VARIABLE_ORDER, ModelSpec, preset
from .unitroot import DETERMINISTICS, IntegrationVerdict, classify_integration

TOP_KEYS = {"sources", "start", "end", "fill", "p_max", "q_max", "level", "unit_root_det",
            "diagnostic_orders", "models", "output", "plots"}
SOURCE_KEYS = {"path", "schema"}
PRESET_KEYS = {"preset", "dummy_set"}
MODEL_KEYS = {"id", "endogenous", "exogenous", "det", "dummy_set", "dependent"}


@dataclass(frozen=True)
class SourceSpec:
    path: Path
    schema: Mapping[str, str] | None = None


@dataclass(frozen=True)
class RunConfig:
    sources: tuple[SourceSpec, ...]
    start: date
    end: date
    models: tuple[ModelSpec, ...]
    output: Path
    fill: Mapping[str, str] = field(default_factory=lambda: {"default": "forward-fill"})
    p_max: int = 4
    q_max: int = 4
    level: float = 0.05
    unit_root_det: str = "const+trend"
    diagnostic_orders: tuple[int, ...] = (1,)
    plots: bool = False


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _unknown(mapping: Mapping, allowed: set, where: str):
    extra = sorted(set(mapping) - allowed)
    _require(not extra, f"{where}: unknown key(s) {', '.join(map(str, extra))}")


def _as_date(value, key: str) -> date:
    if isinstance(value, date):
        return value
    try:
        return parse_date(str(value))
    except ValueError:
        raise ConfigError(f"{key}: cannot parse date {value!r}") from None


def _int(value, key: str, lo: int) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool) and value >= lo,
             f"{key} must be an integer >= {lo}")
    return value


def _models(entries) -> tuple[ModelSpec, ...]:
    _require(isinstance(entries, list), "models must be a list")
    _require(len(entries) > 0, "models: at least one model is required")
    out: list[ModelSpec] = []
    for i, entry in enumerate(entries):
        where = f"models[{i}]"
        _require(isinstance(entry, dict), f"{where} must be a mapping")
        if "preset" in entry:
            _unknown(entry, PRESET_KEYS, where)
            sets = entry.get("dummy_set", "two_dummy")
            sets = list(DUMMY_SETS) if sets == "both" else [sets]
            ids = list(PRESET_IDS) if entry["preset"] == "all" else [entry["preset"]]
            for s in sets:
                _require(s in DUMMY_SETS, f"{where}: unknown dummy_set {s!r}")
                for m in ids:
                    _require(m in PRESET_IDS, f"{where}: unknown preset {m!r}")
                    out.append(preset(m, s))
        else:
            _unknown(entry, MODEL_KEYS, where)
            _require("id" in entry and "endogenous" in entry, f"{where}: id and endogenous are required")
            det = entry.get("det", "const")
            _require(det in DETERMINISTICS, f"{where}: det must be one of {DETERMINISTICS}")
            try:
                out.append(ModelSpec(str(entry["id"]), tuple(entry["endogenous"]),
                                     tuple(entry.get("exogenous", ())), det,
                                     entry.get("dummy_set", "two_dummy"),
                                     entry.get("dependent", "btc_price")))
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
    keys = [(m.dummy_set, m.id) for m in out]
    dup = sorted({k for k in keys if keys.count(k) > 1})
    _require(not dup, f"models: duplicate id(s) {', '.join(f'{i} ({s})' for s, i in dup)}")
    return tuple(out)


def parse_config(doc: Any, base_dir: Path = Path("."), output: Path | None = None) -> RunConfig:
    """Validate a config document; relative source paths resolve against ``base_dir``."""
    _require(isinstance(doc, dict), "config must be a mapping")
    _unknown(doc, TOP_KEYS, "config")
    for key in ("sources", "start", "end", "models"):
        _require(key in doc, f"config: missing required key {key!r}")

    _require(isinstance(doc["sources"], list) and doc["sources"], "sources must be a non-empty list")
    sources = []
    for i, s in enumerate(doc["sources"]):
        where = f"sources[{i}]"
        _require(isinstance(s, dict) and "path" in s, f"{where} must be a mapping with a path")
        _unknown(s, SOURCE_KEYS, where)
        schema = s.get("schema")
        _require(schema is None or (isinstance(schema, dict)
                                    and all(isinstance(v, str) for v in schema.values())),
                 f"{where}.schema must map headers to column names")
        path = Path(s["path"])
        sources.append(SourceSpec(path if path.is_absolute() else base_dir / path, schema))

    start, end = _as_date(doc["start"], "start"), _as_date(doc["end"], "end")
    _require(start <= end, "start must not be after end")

    fill = doc.get("fill", "forward-fill")
    fill = {"default": fill} if isinstance(fill, str) else fill
    _require(isinstance(fill, dict) and all(v in FILL_POLICIES for v in fill.values()),
             f"fill policies must be one of {FILL_POLICIES}")

    level = doc.get("level", 0.05)
    _require(level in TABLE_LEVELS, f"level must be one of {TABLE_LEVELS}")
    det = doc.get("unit_root_det", "const+trend")
    _require(det in DETERMINISTICS, f"unit_root_det must be one of {DETERMINISTICS}")
    orders = doc.get("diagnostic_orders", [1])
    _require(isinstance(orders, list) and orders, "diagnostic_orders must be a non-empty list")
    orders = tuple(_int(o, "diagnostic_orders", 1) for o in orders)
    plots = doc.get("plots", False)
    _require(isinstance(plots, bool), "plots must be true or false")

    out_dir = output if output is not None else Path(doc.get("output", "chainardl_output"))
    return RunConfig(tuple(sources), start, end, _models(doc["models"]), Path(out_dir), dict(fill),
                     _int(doc.get("p_max", 4), "p_max", 1), _int(doc.get("q_max", 4), "q_max", 0),
                     float(level), det, orders, plots)


def load_config(path, output: Path | None = None) -> RunConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from None
    return parse_config(doc, path.parent, output)


# ---------------------------------------------------------------------------
# Running


@dataclass
class ModelOutcome:
    model: ModelSpec
    status: str  # ecm | difference | i2_abort | failed
    fit: ArdlFit | None = None
    ecm: EcmFit | None = None
    bounds: BoundsResult | None = None
    diagnostics: DiagnosticsReport | None = None
    long_run: list[ReportRow] = field(default_factory=list)
    short_run: list[ReportRow] = field(default_factory=list)
    message: str = ""
    i2_series: tuple[str, ...] = ()


@dataclass
class RunResult:
    config: RunConfig
    frame: Frame
    verdicts: dict[str, IntegrationVerdict]
    outcomes: list[ModelOutcome]
    files: list[Path] = field(default_factory=list)

    @property
    def i2_aborts(self) -> list[ModelOutcome]:
        return [o for o in self.outcomes if o.status == "i2_abort"]


def build_frame(config: RunConfig) -> Frame:
    frames = []
    for s in config.sources:
        try:
            frames.append(load_csv(s.path, s.schema))
        except OSError as exc:
            raise DataError(f"cannot read {s.path}: {exc.strerror or exc}") from None
    aligned = align_daily(frames, config.start, config.end, config.fill)
    # recipes whose inputs the sources lack are skipped; models naming their
    # outputs then fail name resolution
    available = set(aligned.names)
    usable = []
    for r in STANDARD_RECIPES:
        if all(i in available for i in r.inputs):
            usable.append(r)
            available.add(r.name)
    return construct_variables(aligned, usable)


def _check_names(frame: Frame, models: Sequence[ModelSpec]):
    for m in models:
        missing = [v for v in (m.dependent, *m.endogenous, *m.exogenous) if v not in frame]
        _require(not missing, f"model {m.id} ({m.dummy_set}): unknown variable(s) {', '.join(missing)}")


def _screen(frame: Frame, names: Sequence[str], det: str) -> tuple[dict, dict]:
    verdicts, errors = {}, {}
    for name in names:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            try:
                verdicts[name] = classify_integration(frame[name], det, name)
            except EstimationError as exc:
                errors[name] = str(exc)
    return verdicts, errors


def estimate_model(frame: Frame, model: ModelSpec, config: RunConfig) -> ModelOutcome:
    y, x, z = model.dependent, model.endogenous, model.exogenous
    sub = frame.complete_span([y, *x, *z])
    spec = select_lags(sub, y, x, config.p_max, config.q_max, model.det, z)
    fit = fit_ardl(sub, y, x, spec)
    ecm = to_ecm(fit)
    bres = bounds_test(ecm, config.level)
    diag = run_diagnostics(fit.ols, config.diagnostic_orders)
    if bres.decision == Decision.FAIL_TO_REJECT:
        dfit = fit_difference(sub, y, x, spec)
        return ModelOutcome(model, "difference", fit, ecm, bres, diag, [], difference_rows(dfit, y),
                            "no levels relationship: first-difference model without error-correction term")
    return ModelOutcome(model, "ecm", fit, ecm, bres, diag, long_run_table(ecm), short_run_table(ecm))


def run(config: RunConfig, write: bool = True) -> RunResult:
    frame = build_frame(config)
    _check_names(frame, config.models)

    screened = []
    for m in config.models:
        for v in (m.dependent, *m.endogenous):
            if v not in screened:
                screened.append(v)
    verdicts, screen_errors = _screen(frame, screened, config.unit_root_det)

    outcomes = []
    for m in config.models:
        series = (m.dependent, *m.endogenous)
        bad = tuple(v for v in series if v in verdicts and verdicts[v].is_i2)
        if bad:
            err = IntegrationOrderError(bad)
            outcomes.append(ModelOutcome(m, "i2_abort", message=str(err), i2_series=bad))
            continue
        failed = [f"{v}: {screen_errors[v]}" for v in series if v in screen_errors]
        if failed:
            outcomes.append(ModelOutcome(m, "failed", message="unit-root screening failed: " + "; ".join(failed)))
            continue
        try:
            outcomes.append(estimate_model(frame, m, config))
        except (EstimationError, ConfigError) as exc:
            outcomes.append(ModelOutcome(m, "failed", message=f"{type(exc).__name__}: {exc}"))

    result = RunResult(config, frame, verdicts, outcomes)
    if write:
        result.files = write_outputs(result)
    return result


# ---------------------------------------------------------------------------
# Output


def _clean(v):
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _rows_json(rows: Sequence[ReportRow]) -> list[dict]:
    return [{"key": r.key, "label": r.label, "value": r.value, "se": r.se, "p": r.p, "stars": r.stars}
            for r in rows]


def _verdict_json(v: IntegrationVerdict) -> dict:
    def one(r):
        return None if r is None else {"stat": r.stat, "det": r.det, "lags_or_bandwidth": r.lags_or_bandwidth,
                                       "nobs": r.nobs, "crit_5pct": r.crit[0.05], "reject_5pct": r.reject_5pct}
    return {"order": v.order, "adf_level": one(v.adf_level), "pp_level": one(v.pp_level),
            "adf_diff": one(v.adf_diff), "pp_diff": one(v.pp_diff), "notes": list(v.notes)}


def _outcome_json(o: ModelOutcome) -> dict:
    m = o.model
    d: dict[str, Any] = {"status": o.status, "message": o.message, "dependent": m.dependent,
                         "endogenous": list(m.endogenous), "exogenous": list(m.exogenous), "det": m.det}
    if o.i2_series:
        d["i2_series"] = list(o.i2_series)
    if o.fit is not None:
        spec = o.fit.spec
        first, last = o.fit.sample
        d["lags"] = {"p": spec.p, "q": dict(zip(o.fit.x, spec.q))}
        d["sample"] = {"first": first.isoformat(), "last": last.isoformat(), "nobs": o.fit.ols.n}
    if o.ecm is not None:
        d["alpha"] = o.ecm.alpha
        d["alpha_se"] = o.ecm.alpha_se
    if o.bounds is not None:
        b, cv = o.bounds, o.bounds.bounds
        d["bounds"] = {"F": b.f_stat, "t": b.t_stat, "k": b.k, "case": b.case, "level": b.level,
                       "decision": b.decision.value, "f_lower": cv.f_lower, "f_upper": cv.f_upper,
                       "t_lower": cv.t_lower, "t_upper": cv.t_upper, "critical_values": cv.source}
    if o.diagnostics is not None:
        r = o.diagnostics
        d["diagnostics"] = {
            "breusch_godfrey": {str(k): list(v) for k, v in r.bg_lm.items()},
            "durbin_alternative": {str(k): [v.stat, list(v.dof), v.p] for k, v in r.durbin_alt.items()},
            "breusch_pagan": list(r.breusch_pagan), "jarque_bera": list(r.normality),
            "cusum": None if r.cusum is None else {"stable": r.cusum.stable, "start": r.cusum.start,
                                                   "max_abs_ratio": float(np.max(np.abs(r.cusum.path)
                                                                                 / r.cusum.upper))},
            "cusum_error": r.cusum_error,
        }
    d["long_run"] = _rows_json(o.long_run)
    d["short_run"] = _rows_json(o.short_run)
    return d


def _footnotes(outcomes: Sequence[ModelOutcome], long_run: bool) -> str:
    lines = []
    for o in outcomes:
        if o.status == "ecm" and o.bounds is not None and o.bounds.decision == Decision.INCONCLUSIVE:
            lines.append(f"{o.model.id}: bounds test inconclusive at {o.bounds.level:g}")
        elif o.status == "difference":
            lines.append(f"{o.model.id}: {o.message}" if not long_run else
                         f"{o.model.id}: no levels relationship; no long-run coefficients")
        elif o.status in ("i2_abort", "failed"):
            lines.append(f"{o.model.id}: not estimated ({o.message})")
    notes = ["*** p<0.01, ** p<0.05, * p<0.10; robust (HC1) standard errors."]
    return "\n" + "\n".join(notes + lines) + "\n"


def write_outputs(result: RunResult) -> list[Path]:
    config = result.config
    out = config.output
    out.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []

    def put(name: str, data: bytes | str):
        path = out / name
        path.write_bytes(data.encode("utf-8") if isinstance(data, str) else data)
        files.append(path)

    verdicts = [result.verdicts[n] for n in result.verdicts]
    put("unit_roots.txt", report.unit_root_table(verdicts))

    used = {v for m in config.models for v in (m.dependent, *m.endogenous, *m.exogenous)}
    order = ("btc_price", *VARIABLE_ORDER, *EXOG_ORDER)
    stat_cols = [c for c in order if c in used] + sorted(used - set(order))
    rows = descriptive_stats(result.frame, stat_cols)
    put("descriptive_stats.txt", format_stats(rows))
    put("descriptive_stats.json", json.dumps(_clean(stats_records(rows)), indent=2, sort_keys=True) + "\n")

    titles = {"two_dummy": "models with two dummies", "one_dummy": "models with one dummy"}
    for dset in DUMMY_SETS:
        group = [o for o in result.outcomes if o.model.dummy_set == dset]
        if not group:
            continue
        lr = {o.model.id: o.long_run for o in group}
        sr = {o.model.id: o.short_run for o in group}
        lr_title = f"Long-run impacts ({titles[dset]})"
        sr_title = f"Short-run impacts ({titles[dset]})"
        put(f"long_run_{dset}.txt", report.render_table(lr, "text", lr_title).decode() + _footnotes(group, True))
        put(f"long_run_{dset}.md", report.render_table(lr, "markdown", lr_title).decode()
            + _footnotes(group, True))
        put(f"long_run_{dset}.json", report.render_table(lr, "json", lr_title))
        put(f"short_run_{dset}.txt", report.render_table(sr, "text", sr_title).decode() + _footnotes(group, False))
        put(f"short_run_{dset}.md", report.render_table(sr, "markdown", sr_title).decode()
            + _footnotes(group, False))
        put(f"short_run_{dset}.json", report.render_table(sr, "json", sr_title))

    bounds_txt, diag_txt = [], []
    for o in result.outcomes:
        tag = f"{o.model.id} ({o.model.dummy_set})"
        if o.bounds is not None:
            bounds_txt.append(report.bounds_block(tag, o.bounds))
        else:
            bounds_txt.append(f"{tag}: not tested ({o.message})\n")
        if o.diagnostics is not None:
            diag_txt.append(report.diagnostics_block(tag, o.diagnostics))
    put("bounds.txt", "\n".join(bounds_txt))
    put("diagnostics.txt", "\n".join(diag_txt))

    doc = {
        "config": {
            "start": config.start.isoformat(), "end": config.end.isoformat(), "p_max": config.p_max,
            "q_max": config.q_max, "level": config.level, "unit_root_det": config.unit_root_det,
            "diagnostic_orders": list(config.diagnostic_orders),
            "sources": [s.path.name for s in config.sources],
        },
        "nobs": len(result.frame),
        "unit_roots": {n: _verdict_json(v) for n, v in result.verdicts.items()},
        "models": {dset: {o.model.id: _outcome_json(o) for o in result.outcomes if o.model.dummy_set == dset}
                   for dset in DUMMY_SETS if any(o.model.dummy_set == dset for o in result.outcomes)},
    }
    put("results.json", json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n")

    if config.plots:
        from . import plots
        files.extend(plots.write_plots(result, out))
    return files


def exit_code(result: RunResult) -> int:
    return 4 if result.i2_aborts else 0
