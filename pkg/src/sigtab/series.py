"""Core series containers and the price preprocessing chain.

Daily bars are reduced to an average price, moved to log space, and extended
with 5- and 21-day moving averages of the log price.  The result is a
3-channel multivariate series (log price, MA5, MA21) consumed by every price
feature family.  A cell is "present" only when its full look-back window
exists; warm-up rows are masked, never zero-filled.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

PRICE_CHANNELS = ("log_price", "ma5", "ma21")


@dataclass(frozen=True)
class LookbackWindow:
    """Trailing window of k trading days ending at the as-of date."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidInputError(f"look-back window must be >= 2 days, got {self.k}")


@dataclass(frozen=True)
class OhlcBar:
    """One day of dividend- and split-adjusted prices."""

    date: dt.date
    open: float
    high: float
    low: float
    close: float

    def __post_init__(self):
        for name in ("open", "high", "low", "close"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidInputError(f"{self.date}: {name} price must be a positive finite number, got {v}")
        if self.low > min(self.open, self.close) or self.high < max(self.open, self.close):
            raise InvalidInputError(f"{self.date}: low/high do not bracket open/close")


@dataclass(frozen=True)
class MultivariateSeries:
    """T x N series for one asset, aligned to a contiguous calendar slice.

    ``values[t, c]`` is meaningful only where ``mask[t, c]`` is True; masked
    cells hold NaN.  Channel count is fixed over time.
    """

    asset_id: str
    channels: tuple[str, ...]
    dates: tuple[dt.date, ...]
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        m = np.asarray(self.mask, dtype=bool)
        if v.ndim != 2 or v.shape[1] != len(self.channels):
            raise InvalidInputError(f"values must be T x {len(self.channels)}, got {v.shape}")
        if v.shape[0] != len(self.dates):
            raise InvalidInputError("values and dates length mismatch")
        if m.shape != v.shape:
            raise InvalidInputError("mask and values shape mismatch")
        if not np.all(np.isfinite(v[m])):
            raise InvalidInputError("non-finite value in a present cell")
        v.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mask", m)

    def __len__(self) -> int:
        return self.values.shape[0]

    def channel(self, name: str) -> np.ndarray:
        return self.values[:, self.channels.index(name)]

    def fully_present_rows(self) -> np.ndarray:
        """Boolean row mask: True where every channel is present."""
        return self.mask.all(axis=1)


def average_price(bar: OhlcBar) -> float:
    """Simple average of the four adjusted prices of one bar."""
    return (bar.open + bar.high + bar.low + bar.close) / 4.0


def log_return_series(avg_prices: np.ndarray) -> np.ndarray:
    """Day-over-day log returns log(p_t) - log(p_{t-1}); length T-1."""
    p = np.asarray(avg_prices, dtype=float)
    if p.ndim != 1 or p.shape[0] < 2:
        raise InvalidInputError("need at least two prices for a return series")
    if not np.all((p > 0) & np.isfinite(p)):
        raise InvalidInputError("prices must be positive and finite")
    logp = np.log(p)
    return logp[1:] - logp[:-1]


def moving_average(x: np.ndarray, window: LookbackWindow) -> np.ndarray:
    """Trailing mean over the last k values; NaN before the first full window.

    A window larger than the series yields an all-NaN output of the input
    length (callers treat an all-missing result as "window too large").
    """
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape[0], np.nan)
    k = window.k
    if k > x.shape[0]:
        return out
    c = np.concatenate(([0.0], np.cumsum(x)))
    out[k - 1:] = (c[k:] - c[:-k]) / k
    return out


def build_price_path(
    asset_id: str, bars: list[OhlcBar], ma_lags: tuple[int, ...] = (5, 21)
) -> MultivariateSeries:
    """Multichannel path: log average price plus its moving averages.

    Default channels are (log_price, ma5, ma21).  Rows where an MA window is
    not yet full carry the missingness mask; with the default lags the first
    20 rows are never fully present.
    """
    if len(bars) < max(ma_lags):
        raise InvalidInputError(f"{asset_id}: need at least {max(ma_lags)} bars, got {len(bars)}")
    dates = [b.date for b in bars]
    for a, b in zip(dates, dates[1:]):
        if a >= b:
            raise InvalidInputError(f"{asset_id}: bars not strictly date-sorted at {a} -> {b}")
    logp = np.log(np.array([average_price(b) for b in bars]))
    columns = [logp] + [moving_average(logp, LookbackWindow(k)) for k in ma_lags]
    values = np.column_stack(columns)
    mask = ~np.isnan(values)
    return MultivariateSeries(
        asset_id=asset_id,
        channels=("log_price",) + tuple(f"ma{k}" for k in ma_lags),
        dates=tuple(dates),
        values=values,
        mask=mask,
    )
