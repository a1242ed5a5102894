"""Synthetic market data for desk-scale testing.

Geometric-random-walk prices, Poisson news events with bounded sentiment,
random monthly financial columns, full universe membership, and rank-scaled
weekly targets.  The target can carry a planted monotone signal driven by
the first financial column (value as known at each week, no look-ahead):
strength 1 makes the target a pure rank of that column, strength 0 is pure
noise.  All randomness flows from one integer seed; identical seeds yield
byte-identical files.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .calendar import TradingCalendar
from .config import PipelineConfig
from .dataset import KEY_COLUMNS

DRIVER_COLUMN = "fin.f001"


@dataclass(frozen=True)
class SynthData:
    calendar: TradingCalendar
    prices: pd.DataFrame
    events: pd.DataFrame
    financials: pd.DataFrame
    universe: pd.DataFrame
    targets: pd.DataFrame


def _month_ends(calendar: TradingCalendar) -> list[dt.date]:
    """Last trading day of each calendar month."""
    last: dict[tuple[int, int], dt.date] = {}
    for d in calendar.dates:
        last[(d.year, d.month)] = d
    return sorted(last.values())


def generate(config: PipelineConfig) -> SynthData:
    s = config.synth
    rng = np.random.default_rng(config.seed)
    calendar = TradingCalendar.business_days(
        dt.date.fromisoformat(config.calendar_start), dt.date.fromisoformat(config.calendar_end)
    )
    n_days = len(calendar)
    assets = [f"asset{i:04d}" for i in range(s.n_assets)]
    dates_iso = [d.isoformat() for d in calendar.dates]
    anchors = list(calendar.anchors)
    anchors_iso = [d.isoformat() for d in anchors]

    # --- prices: GBM close path, open/high/low jittered around it ---------
    price_frames = []
    for asset in assets:
        start = np.exp(rng.uniform(np.log(s.start_price_low), np.log(s.start_price_high)))
        rets = rng.normal(s.daily_drift, s.daily_vol, n_days)
        close = start * np.exp(np.cumsum(rets))
        open_ = np.empty(n_days)
        open_[0] = start
        open_[1:] = close[:-1]
        hi_jit = np.abs(rng.normal(0.0, 0.003, n_days))
        lo_jit = np.abs(rng.normal(0.0, 0.003, n_days))
        high = np.maximum(open_, close) * (1.0 + hi_jit)
        low = np.minimum(open_, close) * (1.0 - lo_jit)
        price_frames.append(pd.DataFrame({
            "asset_id": asset, "date": dates_iso,
            "open": open_, "high": high, "low": low, "close": close,
        }))
    prices = pd.concat(price_frames, ignore_index=True)

    # --- events ------------------------------------------------------------
    categories = [f"cat{i:03d}" for i in range(s.n_categories)]
    cat_weights = 1.0 / (1.0 + 0.01 * np.arange(s.n_categories))
    cat_weights /= cat_weights.sum()
    event_rows = []
    for asset in assets:
        counts = rng.poisson(s.events_per_day, n_days)
        for day_idx in np.flatnonzero(counts):
            for _ in range(int(counts[day_idx])):
                relevance = int(rng.choice([100, 99, 90, 50], p=[0.55, 0.15, 0.15, 0.15]))
                similar = float(rng.exponential(15.0))
                sentiment = float(np.clip(rng.normal(0.0, 0.45), -1.0, 1.0))
                category = categories[int(rng.choice(s.n_categories, p=cat_weights))]
                event_rows.append((asset, dates_iso[day_idx], relevance, similar, sentiment, category))
    events = pd.DataFrame(
        event_rows, columns=["asset_id", "date", "relevance", "similar_days", "sentiment", "category"]
    )

    # --- monthly financials --------------------------------------------------
    month_ends = _month_ends(calendar)
    fin_cols = [f"fin.f{i + 1:03d}" for i in range(s.n_financial_columns)]
    n_me = len(month_ends)
    fin_frames = []
    driver_by_asset = {}
    for asset in assets:
        block = rng.normal(0.0, 1.0, (n_me, s.n_financial_columns))
        block[:, 0] = np.cumsum(rng.normal(0.0, 1.0, n_me))  # driver walks, ranks persist
        driver_by_asset[asset] = block[:, 0]
        frame = pd.DataFrame(block, columns=fin_cols)
        frame.insert(0, "month_end", [d.isoformat() for d in month_ends])
        frame.insert(0, "asset_id", asset)
        fin_frames.append(frame)
    financials = pd.concat(fin_frames, ignore_index=True)

    # --- universe: every asset is a member every week -----------------------
    universe = pd.DataFrame(
        [(w, a) for w in anchors_iso for a in assets], columns=KEY_COLUMNS
    )

    # --- targets: rank-scaled mix of known driver value and noise -----------
    me_array = np.array(month_ends)
    driver_matrix = np.vstack([driver_by_asset[a] for a in assets])  # (assets, month_ends)
    target_rows = []
    for wi, w in enumerate(anchors):
        prior = int(np.searchsorted(me_array, w))  # month-ends strictly before w
        if prior == 0:
            known = np.zeros(len(assets))
        else:
            known = driver_matrix[:, prior - 1]
        sd = known.std()
        z = (known - known.mean()) / sd if sd > 0 else np.zeros(len(assets))
        noise = rng.normal(0.0, 1.0, len(assets))
        raw = s.signal_strength * z + (1.0 - s.signal_strength) * noise
        order = np.argsort(np.argsort(raw, kind="stable"), kind="stable")
        target = order / (len(assets) - 1.0) if len(assets) > 1 else np.full(len(assets), 0.5)
        for ai, asset in enumerate(assets):
            target_rows.append((anchors_iso[wi], asset, target[ai]))
    targets = pd.DataFrame(target_rows, columns=KEY_COLUMNS + ["target"])

    return SynthData(
        calendar=calendar,
        prices=prices,
        events=events.sort_values(["asset_id", "date", "category"], kind="mergesort").reset_index(drop=True),
        financials=financials,
        universe=universe,
        targets=targets,
    )
