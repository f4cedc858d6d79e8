"""Date-indexed daily panel.

A :class:`Frame` holds calendar dates as integer day offsets from
1970-01-01 and one float64 vector per named series; missing cells are NaN.
Frames are immutable: every operation returns a new frame and the
underlying arrays are flagged read-only.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, ConstructionError, ParseError, SchemaError

EPOCH = date(1970, 1, 1)
_EPOCH_ORDINAL = EPOCH.toordinal()

FILL_POLICIES = ("forward-fill", "strict")

# Human-readable labels used by the report tables.
DISPLAY_NAMES = {
    "btc_price": "BTC price",
    "bank_netflow": "Bank netflow",
    "bank_whale_netflow": "Bank whale netflow",
    "bank_reserve": "Bank reserve",
    "fund_volume": "Fund volume",
    "exchange_netflow": "Exchange netflow",
    "exchange_whale_netflow": "Exchange whale netflow",
    "exchange_reserve": "Exchange reserve",
    "on_chain_btc_transactions": "On chain BTC transactions",
    "coin_days_destroyed": "Coin days destroyed",
    "total_supply": "Total supply",
    "dff": "DFF",
    "dfii10": "DFII10",
    "cpiaucsl": "CPIAUCSL",
    "will5000pr": "WILL5000PR",
    "gold_price": "Gold price",
}


def display_name(name: str) -> str:
    return DISPLAY_NAMES.get(name, name)


def to_day(d: date | str | int) -> int:
    """Convert a date, ISO string or day offset to a day offset."""
    if isinstance(d, (int, np.integer)):
        return int(d)
    if isinstance(d, str):
        d = parse_date(d)
    if isinstance(d, datetime):
        d = d.date()
    return d.toordinal() - _EPOCH_ORDINAL


def from_day(day: int) -> date:
    return date.fromordinal(int(day) + _EPOCH_ORDINAL)


def parse_date(text: str) -> date:
    """Parse ``YYYY-MM-DD`` or ``DD.MM.YYYY``."""
    text = text.strip()
    for fmt in ("%Y-%m-%d", "%d.%m.%Y"):
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unrecognised date {text!r}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Frame:
    """Immutable panel of named series over ordered dates."""

    dates: np.ndarray
    columns: Mapping[str, np.ndarray]
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        dates = np.array(self.dates, dtype=np.int64, copy=True)
        if dates.ndim != 1:
            raise SchemaError("dates must be one-dimensional")
        if dates.size > 1 and np.any(np.diff(dates) <= 0):
            raise SchemaError("dates must be strictly increasing")
        dates.setflags(write=False)
        cols = {}
        for name, values in self.columns.items():
            arr = _readonly(values)
            if arr.shape != dates.shape:
                raise SchemaError(
                    f"column {name!r} has {arr.size} values for {dates.size} dates"
                )
            cols[name] = arr
        meta = {name: str(self.meta.get(name, "")) for name in cols}
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "meta", meta)

    def __len__(self) -> int:
        return int(self.dates.size)

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise KeyError(f"no column {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def date_list(self) -> list[date]:
        return [from_day(d) for d in self.dates]

    def with_columns(self, values: Mapping[str, np.ndarray], meta: Mapping[str, str] | None = None) -> "Frame":
        cols = dict(self.columns)
        cols.update(values)
        new_meta = dict(self.meta)
        new_meta.update(meta or {})
        return Frame(self.dates, cols, new_meta)

    def select(self, names: Iterable[str]) -> "Frame":
        names = list(names)
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise SchemaError(f"columns not in frame: {', '.join(missing)}")
        return Frame(self.dates, {n: self.columns[n] for n in names},
                     {n: self.meta[n] for n in names})

    def rows(self, mask_or_slice) -> "Frame":
        return Frame(self.dates[mask_or_slice],
                     {n: v[mask_or_slice] for n, v in self.columns.items()}, self.meta)

    def between(self, start, end) -> "Frame":
        lo, hi = to_day(start), to_day(end)
        return self.rows((self.dates >= lo) & (self.dates <= hi))

    def complete_span(self, names: Sequence[str]) -> "Frame":
        """Drop leading and trailing rows where any of ``names`` is missing."""
        ok = np.ones(len(self), dtype=bool)
        for n in names:
            ok &= ~np.isnan(self[n])
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            return self.rows(slice(0, 0))
        return self.rows(slice(idx[0], idx[-1] + 1))


# ---------------------------------------------------------------------------
# CSV input/output


def _parse_number(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def load_csv(path, schema: Mapping[str, str] | None = None) -> Frame:
    """Load a provider CSV export.

    The first column holds dates (``YYYY-MM-DD`` or ``DD.MM.YYYY``); empty
    cells are missing values. ``schema`` maps source headers to the
    canonical column name they fill, or to ``"ignore"``. Without a schema
    every column is loaded under its header.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if not header or header[0].lower() != "date":
            raise SchemaError(f"{path}: first column must be 'date', got {header[:1]}")
        fields = header[1:]
        if len(set(fields)) != len(fields):
            raise SchemaError(f"{path}: duplicate column headers")

        if schema is None:
            wanted = {h: h for h in fields}
        else:
            absent = [h for h in schema if h not in fields]
            if absent:
                raise SchemaError(f"{path}: declared columns absent from file: {', '.join(absent)}")
            wanted = {h: role for h, role in schema.items() if role != "ignore"}
            targets = list(wanted.values())
            if len(set(targets)) != len(targets):
                raise SchemaError(f"{path}: schema maps two headers to the same column")

        positions = {h: fields.index(h) + 1 for h in wanted}
        days: list[int] = []
        values = {h: [] for h in wanted}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                day = to_day(parse_date(row[0]))
            except ValueError:
                raise ParseError(path, line_no, header[0], row[0], "date") from None
            days.append(day)
            for h, pos in positions.items():
                cell = row[pos].strip() if pos < len(row) else ""
                if cell == "":
                    values[h].append(np.nan)
                    continue
                try:
                    values[h].append(_parse_number(cell))
                except ValueError:
                    raise ParseError(path, line_no, h, cell, "number") from None

    order = np.argsort(np.asarray(days, dtype=np.int64), kind="stable")
    sorted_days = np.asarray(days, dtype=np.int64)[order]
    dup = np.flatnonzero(np.diff(sorted_days) == 0)
    if dup.size:
        raise SchemaError(f"{path}: duplicate date {from_day(sorted_days[dup[0]]).isoformat()}")
    columns = {wanted[h]: np.asarray(values[h], dtype=np.float64)[order] for h in wanted}
    meta = {wanted[h]: f"{path.name}:{h}" for h in wanted}
    return Frame(sorted_days, columns, meta)


def _format_number(v: float) -> str:
    if np.isnan(v):
        return ""
    return repr(float(v))


def write_csv(frame: Frame, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *frame.names])
        for i, day in enumerate(frame.dates):
            writer.writerow([from_day(day).isoformat()] + [_format_number(frame[n][i]) for n in frame.names])


# ---------------------------------------------------------------------------
# Frequency alignment


def _forward_fill_onto(src_days: np.ndarray, src_vals: np.ndarray, grid: np.ndarray) -> np.ndarray:
    observed = ~np.isnan(src_vals)
    d, v = src_days[observed], src_vals[observed]
    pos = np.searchsorted(d, grid, side="right") - 1
    out = np.full(grid.shape, np.nan)
    ok = pos >= 0
    out[ok] = v[pos[ok]]
    return out


def align_daily(frames: Sequence[Frame], start, end,
                fill: str | Mapping[str, str] = "forward-fill") -> Frame:
    """Merge frames onto the gap-free calendar ``start..end`` (inclusive).

    ``fill`` is one policy for all columns or a mapping of column name to
    policy, with an optional ``"default"`` entry. Forward fill carries the
    last observation at or before each day, including observations dated
    before ``start``; strict keeps only same-day values.
    """
    lo, hi = to_day(start), to_day(end)
    if lo > hi:
        raise AlignmentError("start date is after end date")
    if not frames:
        raise AlignmentError("no frames to align")
    grid = np.arange(lo, hi + 1, dtype=np.int64)

    if isinstance(fill, str):
        policies: Mapping[str, str] = {"default": fill}
    else:
        policies = dict(fill)
    for col, pol in policies.items():
        if pol not in FILL_POLICIES:
            raise AlignmentError(f"unknown fill policy {pol!r} for {col!r}")
    default = policies.get("default", "forward-fill")

    columns: dict[str, np.ndarray] = {}
    meta: dict[str, str] = {}
    for fr in frames:
        if len(fr) == 0:
            raise AlignmentError("cannot align an empty frame")
        for name in fr.names:
            if name in columns:
                raise SchemaError(f"column {name!r} supplied by more than one source")
            policy = policies.get(name, default)
            if policy == "forward-fill":
                out = _forward_fill_onto(fr.dates, fr[name], grid)
            else:
                out = np.full(grid.shape, np.nan)
                pos = np.searchsorted(fr.dates, grid)
                hit = (pos < len(fr)) & (fr.dates[np.minimum(pos, len(fr) - 1)] == grid)
                out[hit] = fr[name][pos[hit]]
            if np.all(np.isnan(out)):
                raise AlignmentError(f"column {name!r} has no observations in {from_day(lo)}..{from_day(hi)}")
            columns[name] = out
            meta[name] = fr.meta.get(name, "")
    return Frame(grid, columns, meta)


# ---------------------------------------------------------------------------
# Variable construction


@dataclass(frozen=True)
class VariableRecipe:
    """A constructed column: a pure function of declared inputs and the dates.

    ``compute`` receives the input columns in the order of ``inputs``
    followed by the day-offset vector.
    """

    name: str
    inputs: tuple[str, ...]
    compute: Callable[..., np.ndarray]
    formula: str = ""

    def evaluate(self, frame: Frame) -> np.ndarray:
        absent = [c for c in self.inputs if c not in frame]
        if absent:
            raise ConstructionError(f"recipe {self.name!r} needs missing column(s): {', '.join(absent)}")
        out = np.asarray(self.compute(*(frame[c] for c in self.inputs), frame.dates), dtype=np.float64)
        if out.shape != frame.dates.shape:
            raise ConstructionError(f"recipe {self.name!r} returned wrong length")
        return out


def difference(name: str, a: str, b: str) -> VariableRecipe:
    return VariableRecipe(name, (a, b), lambda x, y, _d: x - y, f"{a} - {b}")


def product(name: str, a: str, b: str) -> VariableRecipe:
    return VariableRecipe(name, (a, b), lambda x, y, _d: x * y, f"{a} * {b}")


def complement_share(name: str, total: str, pct: str) -> VariableRecipe:
    """``total * (1 - pct/100)``; warns when ``pct`` leaves [0, 100]."""

    def compute(t, r, _d):
        bad = (r < 0) | (r > 100)
        if np.any(bad):
            warnings.warn(
                f"{pct}: {int(bad.sum())} value(s) outside [0, 100] used as-is",
                RuntimeWarning, stacklevel=4,
            )
        return t * (1.0 - r / 100.0)

    return VariableRecipe(name, (total, pct), compute, f"{total} * (1 - {pct}/100)")


def step_dummy(name: str, switch) -> VariableRecipe:
    """0 before ``switch``, 1 from ``switch`` on."""
    s = to_day(switch)
    return VariableRecipe(name, (), lambda d: (d >= s).astype(np.float64),
                          f"0 before {from_day(s).isoformat()} else 1")


def window_dummy(name: str, start, end) -> VariableRecipe:
    """1 on ``[start, end)``, 0 elsewhere."""
    a, b = to_day(start), to_day(end)
    return VariableRecipe(name, (), lambda d: ((d >= a) & (d < b)).astype(np.float64),
                          f"1 on [{from_day(a).isoformat()}, {from_day(b).isoformat()}) else 0")


def row_trend(name: str = "trend") -> VariableRecipe:
    return VariableRecipe(name, (), lambda d: np.arange(d.size, dtype=np.float64), "0, 1, 2, ... over rows")


DUMMY1_SWITCH = date(2020, 11, 20)
DUMMY2_SWITCH = date(2022, 11, 8)

STANDARD_RECIPES: tuple[VariableRecipe, ...] = (
    difference("bank_whale_netflow", "bank_inflow_top10", "bank_outflow_top10"),
    difference("exchange_whale_netflow", "exchange_inflow_top10", "exchange_outflow_top10"),
    complement_share("on_chain_btc_transactions", "tokens_transferred_total", "fund_flow_ratio"),
    step_dummy("dummy1", DUMMY1_SWITCH),
    step_dummy("dummy2", DUMMY2_SWITCH),
    window_dummy("dummy3", DUMMY1_SWITCH, DUMMY2_SWITCH),
    row_trend("trend"),
    product("timedummy1", "dummy1", "trend"),
    product("timedummy2", "dummy2", "trend"),
    product("timedummy3", "dummy3", "trend"),
)


def construct_variables(raw: Frame, recipes: Sequence[VariableRecipe] = STANDARD_RECIPES) -> Frame:
    """Append constructed columns, evaluating recipes in order.

    Later recipes may use columns produced by earlier ones.
    """
    frame = raw
    for recipe in recipes:
        values = recipe.evaluate(frame)
        frame = frame.with_columns({recipe.name: values},
                                   {recipe.name: f"constructed: {recipe.formula}"})
    return frame


# ---------------------------------------------------------------------------
# Lags and differences


def lag(x, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if k < 0 or k >= x.size:
        raise ValueError(f"lag {k} invalid for series of length {x.size}")
    out = np.full(x.shape, np.nan)
    out[k:] = x[: x.size - k]
    return out


def diff(x, k: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if k < 1 or k >= x.size:
        raise ValueError(f"difference order {k} invalid for series of length {x.size}")
    out = np.full(x.shape, np.nan)
    out[k:] = x[k:] - x[:-k]
    return out


# ---------------------------------------------------------------------------
# Descriptive statistics


@dataclass(frozen=True)
class StatsRow:
    column: str
    n: int
    mean: float
    sd: float
    min: float
    max: float


def descriptive_stats(frame: Frame, columns: Sequence[str] | None = None) -> list[StatsRow]:
    if len(frame) == 0:
        raise ValueError("frame is empty")
    rows = []
    for name in columns or frame.names:
        v = frame[name]
        v = v[~np.isnan(v)]
        if v.size == 0:
            rows.append(StatsRow(name, 0, np.nan, np.nan, np.nan, np.nan))
            continue
        sd = float(np.std(v, ddof=1)) if v.size > 1 else np.nan
        rows.append(StatsRow(name, int(v.size), float(np.mean(v)), sd, float(v.min()), float(v.max())))
    return rows


def _fmt_stat(v: float, scientific: bool) -> str:
    if np.isnan(v):
        return ""
    return f"{v:.2E}" if scientific else f"{v:.3f}"


def format_stats(rows: Sequence[StatsRow]) -> str:
    """Plain-text table: 3 decimals, scientific notation for rows above 1e6."""
    header = ["Variable", "Obs", "Mean", "Std. Dev.", "Min", "Max"]
    body = []
    for r in rows:
        sci = any(abs(v) > 1e6 for v in (r.mean, r.min, r.max) if not np.isnan(v))
        body.append([display_name(r.column), str(r.n)]
                    + [_fmt_stat(v, sci) for v in (r.mean, r.sd, r.min, r.max)])
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = []
    for i, line in enumerate([header, *body]):
        cells = [line[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(line[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def stats_records(rows: Sequence[StatsRow]) -> list[dict]:
    def clean(v):
        return None if isinstance(v, float) and not math.isfinite(v) else v

    return [{"column": r.column, "n": r.n, "mean": clean(r.mean), "sd": clean(r.sd),
             "min": clean(r.min), "max": clean(r.max)} for r in rows]
