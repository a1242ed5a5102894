"""Statistical-moment features of log returns over multiple look-back windows.

Conventions: population (divisor k) central moments, Fisher excess kurtosis,
two-pass computation (mean first, then centered powers).  A zero-variance
window gets skewness = kurtosis = 0 by convention so downstream rank
transforms always see defined values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import LookbackWindow, MultivariateSeries, log_return_series

DEFAULT_WINDOWS = (21, 63, 252)
STAT_NAMES = ("mean", "variance", "skewness", "kurtosis")


@dataclass(frozen=True)
class MomentFeatures:
    mean: float
    variance: float
    skewness: float
    kurtosis: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mean, self.variance, self.skewness, self.kurtosis)


def moments(x: np.ndarray, window: LookbackWindow) -> MomentFeatures | None:
    """First four moments of the trailing window of x; None if too short."""
    x = np.asarray(x, dtype=float)
    k = window.k
    if x.shape[0] < k:
        return None
    w = x[-k:]
    m, v, s, ku = _moments_two_pass(w[None, :])
    return MomentFeatures(float(m[0]), float(v[0]), float(s[0]), float(ku[0]))


def _moments_two_pass(w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise (mean, variance, skewness, excess kurtosis) of a 2-d array."""
    mu = w.mean(axis=1)
    c = w - mu[:, None]
    m2 = np.mean(c * c, axis=1)
    m3 = np.mean(c ** 3, axis=1)
    m4 = np.mean(c ** 4, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        skew = np.where(m2 > 0, m3 / np.power(m2, 1.5, where=m2 > 0), 0.0)
        kurt = np.where(m2 > 0, m4 / np.square(m2, where=m2 > 0) - 3.0, 0.0)
    return mu, m2, skew, kurt


def moment_feature_names(windows=DEFAULT_WINDOWS) -> list[str]:
    return [f"stats.{stat}.w{k}" for k in windows for stat in STAT_NAMES]


def moment_feature_matrix(
    history: MultivariateSeries,
    asof_indices: list[int],
    windows=DEFAULT_WINDOWS,
) -> np.ndarray:
    """Moment features of log returns for several as-of row indices at once.

    Row i of the result corresponds to asof_indices[i]; rows whose largest
    window is not fully populated are all-NaN (caller drops them).
    """
    logp = history.channel("log_price")
    r = log_return_series(np.exp(logp))  # r[t-1] = logp[t] - logp[t-1]
    idx = np.asarray(asof_indices, dtype=int)
    out = np.full((idx.shape[0], 4 * len(windows)), np.nan)
    for wi, k in enumerate(windows):
        ok = idx >= k  # k returns need k+1 prices
        if not ok.any():
            continue
        starts = idx[ok] - k  # return-series offset: returns r[i-k .. i-1] end at price i
        wins = np.lib.stride_tricks.sliding_window_view(r, k)[starts]
        mu, v, s, ku = _moments_two_pass(wins)
        block = np.column_stack([mu, v, s, ku])
        out[ok, 4 * wi: 4 * wi + 4] = block
    incomplete = idx < max(windows)
    out[incomplete, :] = np.nan
    return out


def moment_feature_row(
    history: MultivariateSeries,
    asof_index: int,
    windows=DEFAULT_WINDOWS,
) -> dict[str, float] | None:
    """12 named features (4 moments x 3 windows) at one as-of date, or None."""
    mat = moment_feature_matrix(history, [asof_index], windows)
    if np.isnan(mat).any():
        return None
    return dict(zip(moment_feature_names(windows), mat[0].tolist()))
