"""Event-driven sentiment features.

News events are filtered to maximally relevant, non-duplicate items, then
averaged per trading day.  The overall daily series treats event-free days
as missing (a window's moving average requires at least one event day);
per-category series zero-fill event-free days before their long moving
average, which keeps them defined despite sparsity.
"""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass

import numpy as np

from .calendar import TradingCalendar
from .errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_CATEGORY_COUNT = 200
OVERALL_WINDOWS = (21, 63, 252)
CATEGORY_WINDOW = 252


@dataclass(frozen=True)
class NewsEvent:
    date: dt.date
    asset_id: str
    relevance: int
    similar_days: float
    sentiment: float
    category: str

    def __post_init__(self):
        if not (0 <= self.relevance <= 100):
            raise InvalidInputError(f"relevance must be in 0..100, got {self.relevance}")
        if self.similar_days < 0:
            raise InvalidInputError(f"similar-days must be >= 0, got {self.similar_days}")
        if not (-1.0 <= self.sentiment <= 1.0):
            raise InvalidInputError(f"sentiment must be in [-1, 1], got {self.sentiment}")


def filter_events(events: list[NewsEvent]) -> list[NewsEvent]:
    """Keep maximally relevant (relevance 100) unique (similar-days > 1) events."""
    return [e for e in events if e.relevance == 100 and e.similar_days > 1]


def daily_average_sentiment(
    events: list[NewsEvent],
    calendar: TradingCalendar,
    zero_fill: bool = False,
) -> np.ndarray:
    """Per-trading-day mean sentiment, aligned to the calendar.

    Event-free days are NaN, or 0 when ``zero_fill`` is set (the category
    series convention).  Events dated outside the calendar are ignored.
    """
    sums = np.zeros(len(calendar))
    counts = np.zeros(len(calendar))
    index = {d: i for i, d in enumerate(calendar.dates)}
    for e in events:
        i = index.get(e.date)
        if i is None:
            continue
        sums[i] += e.sentiment
        counts[i] += 1
    with np.errstate(invalid="ignore"):
        out = sums / counts
    if zero_fill:
        out[counts == 0] = 0.0
    return out


@dataclass(frozen=True)
class CategorySelection:
    categories: tuple[str, ...]
    truncated: bool  # True when fewer distinct categories existed than asked


def select_top_categories(
    events: list[NewsEvent],
    window_start: dt.date,
    window_end: dt.date,
    n: int = DEFAULT_CATEGORY_COUNT,
) -> CategorySelection:
    """The n most frequent event categories within the selection window.

    Counted on filtered events; ties break lexicographically.  The result is
    an ordered, frozen list: downstream feature columns use this order.
    """
    if window_start > window_end:
        raise InvalidInputError("category selection window is empty")
    counts: dict[str, int] = {}
    for e in filter_events(events):
        if window_start <= e.date <= window_end:
            counts[e.category] = counts.get(e.category, 0) + 1
    ordered = sorted(counts, key=lambda c: (-counts[c], c))
    if len(ordered) < n:
        logger.warning(
            "only %d distinct categories in selection window, wanted %d", len(ordered), n
        )
        return CategorySelection(tuple(ordered), truncated=True)
    return CategorySelection(tuple(ordered[:n]), truncated=False)


def sentiment_feature_names(categories: tuple[str, ...]) -> list[str]:
    names = [f"sentiment.overall.w{k}" for k in (1,) + OVERALL_WINDOWS]
    names += [f"sentiment.cat_{c}.w{CATEGORY_WINDOW}" for c in categories]
    return names


def sentiment_feature_matrix(
    asset_events: list[NewsEvent],
    calendar: TradingCalendar,
    asof_indices: list[int],
    categories: tuple[str, ...],
) -> np.ndarray:
    """Sentiment features of one asset at several as-of calendar indices.

    Overall cells may be NaN on their own (no event in the window); rows
    without 252 calendar days of history are absent and must be dropped by
    the caller (signalled by NaN in every category cell, which are otherwise
    always defined).
    """
    kept = filter_events(asset_events)
    t = len(calendar)
    idx = np.asarray(asof_indices, dtype=int)
    width = 4 + len(categories)
    out = np.full((idx.shape[0], width), np.nan)

    daily = daily_average_sentiment(kept, calendar)
    present = ~np.isnan(daily)
    csum = np.concatenate(([0.0], np.cumsum(np.where(present, daily, 0.0))))
    ccnt = np.concatenate(([0.0], np.cumsum(present.astype(float))))

    complete = idx >= CATEGORY_WINDOW - 1
    out[complete, 0] = daily[idx[complete]]
    for col, k in enumerate(OVERALL_WINDOWS, start=1):
        lo = idx[complete] - k + 1
        hi = idx[complete] + 1
        cnt = ccnt[hi] - ccnt[lo]
        with np.errstate(invalid="ignore", divide="ignore"):
            ma = (csum[hi] - csum[lo]) / cnt
        ma[cnt == 0] = np.nan
        out[complete, col] = ma

    by_category: dict[str, list[NewsEvent]] = {c: [] for c in categories}
    for e in kept:
        if e.category in by_category:
            by_category[e.category].append(e)
    for ci, c in enumerate(categories):
        series = daily_average_sentiment(by_category[c], calendar, zero_fill=True)
        cs = np.concatenate(([0.0], np.cumsum(series)))
        lo = idx[complete] - CATEGORY_WINDOW + 1
        hi = idx[complete] + 1
        out[complete, 4 + ci] = (cs[hi] - cs[lo]) / CATEGORY_WINDOW
    return out


def sentiment_feature_row(
    asset_events: list[NewsEvent],
    calendar: TradingCalendar,
    asof_date: dt.date,
    categories: tuple[str, ...],
) -> dict[str, float] | None:
    """4 overall + per-category features at one as-of date, or None.

    Overall cells may individually be NaN (missing) when the window holds no
    events; the row itself is absent only without 252 days of calendar.
    """
    i = calendar.index_of(asof_date)
    if i < CATEGORY_WINDOW - 1:
        return None
    mat = sentiment_feature_matrix(asset_events, calendar, [i], categories)
    return dict(zip(sentiment_feature_names(categories), mat[0].tolist()))
