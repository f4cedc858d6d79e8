"""Optional SVG figures; needs matplotlib (the ``plots`` extra)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .frame import display_name, from_day

SVG_SALT = "chainardl"


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise RuntimeError("plots need matplotlib: pip install 'artifact[plots]'") from exc
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = SVG_SALT
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: Path):
    # no timestamp in the metadata keeps the file reproducible
    fig.savefig(path, format="svg", metadata={"Date": None})


def price_plot(frame, column: str, path: Path) -> Path:
    plt = _pyplot()
    dates = [from_day(d) for d in frame.dates]
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(dates, frame[column], lw=0.8, color="black")
    ax.set_ylabel(display_name(column))
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path


def volume_bars(frame, on_chain: str, off_chain: str, path: Path) -> Path:
    """Monthly totals of an on-chain and an off-chain volume series."""
    plt = _pyplot()
    months = np.array([from_day(d).year * 12 + from_day(d).month - 1 for d in frame.dates])
    keys = np.unique(months)
    on = np.array([np.nansum(np.abs(frame[on_chain][months == k])) for k in keys])
    off = np.array([np.nansum(np.abs(frame[off_chain][months == k])) for k in keys])
    labels = [f"{k // 12}-{k % 12 + 1:02d}" for k in keys]
    fig, ax = plt.subplots(figsize=(9, 3.5))
    pos = np.arange(keys.size)
    ax.bar(pos - 0.2, on, 0.4, label=display_name(on_chain), color="0.3")
    ax.bar(pos + 0.2, off, 0.4, label=display_name(off_chain), color="0.7")
    step = max(1, keys.size // 12)
    ax.set_xticks(pos[::step])
    ax.set_xticklabels(labels[::step], rotation=45, ha="right")
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path


def cusum_plot(res, title: str, path: Path) -> Path:
    plt = _pyplot()
    r = np.arange(res.start + 1, res.start + res.path.size + 1)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(r, res.path, color="black", lw=0.9, label="CUSUM")
    ax.plot(r, res.upper, color="0.5", ls="--", lw=0.8, label=f"{res.level:.0%} bounds")
    ax.plot(r, res.lower, color="0.5", ls="--", lw=0.8)
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path


def write_plots(result, out: Path) -> list[Path]:
    out = Path(out) / "plots"
    out.mkdir(parents=True, exist_ok=True)
    frame = result.frame
    files = []
    if "btc_price" in frame:
        files.append(price_plot(frame, "btc_price", out / "btc_price.svg"))
    if "on_chain_btc_transactions" in frame and "exchange_netflow" in frame:
        files.append(volume_bars(frame, "on_chain_btc_transactions", "exchange_netflow", out / "volumes.svg"))
    for o in result.outcomes:
        if o.diagnostics is not None and o.diagnostics.cusum is not None:
            name = f"cusum_{o.model.id}_{o.model.dummy_set}.svg"
            files.append(cusum_plot(o.diagnostics.cusum, f"{o.model.id} ({o.model.dummy_set})", out / name))
    return files
