"""Walk-forward splits, weekly rank scoring, and strategy statistics.

Weekly predictions are scored with Spearman correlation (average ranks,
then Pearson); the weekly correlation series is summarized by its mean,
sample standard deviation, Sharpe (mean/vol), max drawdown of the running
cumulative sum (peak anchored at 0), and Calmar (mean/MDD).  A deliberately
simple deterministic ridge ranker on quantized features makes the pipeline
testable end to end; externally trained models plug in through the
predictions file instead.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .calendar import TradingCalendar
from .dataset import KEY_COLUMNS, feature_columns, validate_keyed_table
from .errors import ConfigurationError, InvalidInputError

MIN_TRAIN_VALIDATION_GAP_DAYS = 52 * 7
MIN_VALIDATION_TEST_GAP_DAYS = 26 * 7

# Default walk-forward table: five expanding-train schemes over the default
# 2003-01-31 .. 2021-12-31 weekly calendar.
DEFAULT_CV_TABLE = (
    ("CV 0", "2003-01-31", "2010-12-31", "2012-01-06", "2015-12-25", "2016-07-01", "2021-12-31"),
    ("CV 1", "2003-01-31", "2012-01-06", "2013-01-11", "2016-12-30", "2017-06-30", "2021-12-31"),
    ("CV 2", "2003-01-31", "2013-01-04", "2014-01-10", "2017-12-29", "2018-06-29", "2021-12-31"),
    ("CV 3", "2003-01-31", "2014-01-03", "2015-01-09", "2018-12-28", "2019-06-28", "2021-12-31"),
    ("CV 4", "2003-01-31", "2015-01-02", "2016-01-08", "2019-12-27", "2020-06-26", "2021-12-31"),
)

PERIODS = ("train", "gap_train_validation", "validation", "gap_validation_test", "test")


@dataclass(frozen=True)
class CvScheme:
    name: str
    train_start: dt.date
    train_end: dt.date
    validation_start: dt.date
    validation_end: dt.date
    test_start: dt.date
    test_end: dt.date

    def __post_init__(self):
        order = (
            self.train_start, self.train_end, self.validation_start,
            self.validation_end, self.test_start, self.test_end,
        )
        if list(order) != sorted(order) or len(set(order)) != 6:
            raise ConfigurationError(f"{self.name}: scheme dates must be strictly increasing")
        tv_gap = (self.validation_start - self.train_end).days
        if tv_gap < MIN_TRAIN_VALIDATION_GAP_DAYS:
            raise ConfigurationError(
                f"{self.name}: train->validation gap {tv_gap} days, need >= {MIN_TRAIN_VALIDATION_GAP_DAYS}"
            )
        vt_gap = (self.test_start - self.validation_end).days
        if vt_gap < MIN_VALIDATION_TEST_GAP_DAYS:
            raise ConfigurationError(
                f"{self.name}: validation->test gap {vt_gap} days, need >= {MIN_VALIDATION_TEST_GAP_DAYS}"
            )

    def period_of(self, week: dt.date) -> str:
        """Which period a week belongs to; every week gets exactly one label."""
        if week < self.train_start or week > self.test_end:
            return "outside"
        if week <= self.train_end:
            return "train"
        if week < self.validation_start:
            return "gap_train_validation"
        if week <= self.validation_end:
            return "validation"
        if week < self.test_start:
            return "gap_validation_test"
        return "test"

    def period_range(self, period: str) -> tuple[dt.date, dt.date]:
        if period == "train":
            return self.train_start, self.train_end
        if period == "validation":
            return self.validation_start, self.validation_end
        if period == "test":
            return self.test_start, self.test_end
        raise InvalidInputError(f"unknown period '{period}'")

    def as_row(self) -> tuple[str, ...]:
        return (
            self.name,
            *(d.isoformat() for d in (
                self.train_start, self.train_end, self.validation_start,
                self.validation_end, self.test_start, self.test_end,
            )),
        )


def make_cv_schemes(
    table=DEFAULT_CV_TABLE,
    calendar: TradingCalendar | None = None,
) -> list[CvScheme]:
    """Validated walk-forward schemes from a (name, 6 dates) row table.

    Enforces the per-scheme gap invariants, the shared expanding train
    window across schemes, and (when a calendar is given) that every date is
    a weekly anchor.
    """
    schemes = []
    for row in table:
        name, *dates = row
        parsed = [d if isinstance(d, dt.date) else dt.date.fromisoformat(d) for d in dates]
        schemes.append(CvScheme(name, *parsed))
    starts = {s.train_start for s in schemes}
    if len(starts) != 1:
        raise ConfigurationError(f"train start must be fixed across schemes, got {sorted(starts)}")
    ends = [s.train_end for s in schemes]
    if ends != sorted(ends) or len(set(ends)) != len(ends):
        raise ConfigurationError("train end must strictly expand across schemes")
    if calendar is not None:
        anchor_set = set(calendar.anchors)
        for s in schemes:
            for d in (s.train_start, s.train_end, s.validation_start,
                      s.validation_end, s.test_start, s.test_end):
                if d not in anchor_set:
                    raise ConfigurationError(f"{s.name}: {d} is not a weekly anchor")
    return schemes


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _spearman_with_flag(pred: np.ndarray, target: np.ndarray) -> tuple[float, bool]:
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape or pred.ndim != 1 or pred.shape[0] < 2:
        raise InvalidInputError("need two aligned vectors of at least 2 scores")
    rp = rankdata(pred, method="average")
    rt = rankdata(target, method="average")
    sp = rp - rp.mean()
    st = rt - rt.mean()
    denom = np.sqrt((sp * sp).sum() * (st * st).sum())
    if denom == 0.0:
        return 0.0, True  # constant vector: degenerate week scores 0
    return float((sp * st).sum() / denom), False


def spearman_corr(pred: np.ndarray, target: np.ndarray) -> float:
    """Pearson correlation of the average-rank vectors; 0 when degenerate."""
    return _spearman_with_flag(pred, target)[0]


def max_drawdown(corrs: np.ndarray) -> float:
    """Largest drop from a running peak of the cumulative sum (peak >= 0)."""
    corrs = np.asarray(corrs, dtype=float)
    if corrs.size == 0:
        raise InvalidInputError("max_drawdown needs a non-empty series")
    cumulative = np.cumsum(corrs)
    # running peak anchored at 0: a series that only loses has positive MDD
    peaks = np.maximum.accumulate(np.maximum(cumulative, 0.0))
    return float(np.max(peaks - cumulative))


@dataclass(frozen=True)
class CorrSeries:
    weeks: tuple[dt.date, ...]
    corrs: np.ndarray
    degenerate: tuple[bool, ...] = field(default=())

    def __post_init__(self):
        c = np.asarray(self.corrs, dtype=float)
        if c.shape != (len(self.weeks),):
            raise InvalidInputError("one correlation per week required")
        if any(a >= b for a, b in zip(self.weeks, self.weeks[1:])):
            raise InvalidInputError("weeks must be strictly increasing")
        if np.any((c < -1.0 - 1e-12) | (c > 1.0 + 1e-12)):
            raise InvalidInputError("correlations must lie in [-1, 1]")
        if not self.degenerate:
            object.__setattr__(self, "degenerate", tuple(False for _ in self.weeks))
        c.setflags(write=False)
        object.__setattr__(self, "corrs", c)

    def __len__(self) -> int:
        return len(self.weeks)


@dataclass(frozen=True)
class StrategyReport:
    mean_corr: float
    volatility: float
    sharpe: float | None  # None when volatility is 0
    max_drawdown: float
    calmar: float | None  # None when max drawdown is 0
    n_weeks: int
    n_skipped_weeks: int = 0
    n_degenerate_weeks: int = 0


def strategy_report(series: CorrSeries, n_skipped_weeks: int = 0) -> StrategyReport:
    """Summary statistics of a weekly correlation series (needs >= 2 weeks)."""
    if len(series) < 2:
        raise InvalidInputError(f"strategy report needs >= 2 weeks, got {len(series)}")
    mean = float(np.mean(series.corrs))
    vol = float(np.std(series.corrs, ddof=1))
    mdd = max_drawdown(series.corrs)
    return StrategyReport(
        mean_corr=mean,
        volatility=vol,
        sharpe=(mean / vol) if vol > 0 else None,
        max_drawdown=mdd,
        calmar=(mean / mdd) if mdd > 0 else None,
        n_weeks=len(series),
        n_skipped_weeks=n_skipped_weeks,
        n_degenerate_weeks=int(sum(series.degenerate)),
    )


# ---------------------------------------------------------------------------
# Baseline ranker
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RidgeRankModel:
    columns: tuple[str, ...]
    weights: np.ndarray
    target_mean: float
    ridge_lambda: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.columns),):
            raise InvalidInputError("one weight per feature column required")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def fit_baseline_model(
    features: pd.DataFrame,
    targets: pd.DataFrame,
    ridge_lambda: float,
) -> RidgeRankModel:
    """L2-penalized least squares of the centered target on quantized features.

    Missing feature cells count as 0 (the middle bin).  With lambda > 0 the
    normal equations are always nonsingular.
    """
    if ridge_lambda <= 0:
        raise InvalidInputError(f"ridge penalty must be > 0, got {ridge_lambda}")
    validate_keyed_table(features, "training features")
    joined = features.merge(targets[KEY_COLUMNS + ["target"]], on=KEY_COLUMNS, how="inner")
    if joined.empty:
        raise InvalidInputError("no overlapping (week, asset) keys between features and targets")
    cols = feature_columns(features)
    x = np.nan_to_num(joined[cols].to_numpy(dtype=float), nan=0.0)
    y = joined["target"].to_numpy(dtype=float)
    target_mean = float(y.mean())
    yc = y - target_mean
    gram = x.T @ x + ridge_lambda * np.eye(len(cols))
    weights = np.linalg.solve(gram, x.T @ yc)
    return RidgeRankModel(
        columns=tuple(cols),
        weights=weights,
        target_mean=target_mean,
        ridge_lambda=float(ridge_lambda),
    )


def predict_baseline(model: RidgeRankModel, table: pd.DataFrame) -> pd.DataFrame:
    """Linear scores for every (week, asset) row; only their ranks matter."""
    validate_keyed_table(table, "prediction features")
    missing = [c for c in model.columns if c not in table.columns]
    if missing:
        raise InvalidInputError(f"prediction table lacks {len(missing)} model columns, e.g. {missing[:3]}")
    x = np.nan_to_num(table[list(model.columns)].to_numpy(dtype=float), nan=0.0)
    out = table[KEY_COLUMNS].copy()
    out["score"] = x @ model.weights
    return out


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate_predictions(
    predictions: pd.DataFrame,
    targets: pd.DataFrame,
    scheme: CvScheme,
    period: str,
    weeks: list[dt.date],
) -> tuple[StrategyReport, CorrSeries]:
    """Weekly Spearman scoring of predictions over a scheme period.

    ``weeks`` is the week universe to score (e.g. the calendar's weekly
    anchors); only those inside the scheme period count.  Weeks with fewer
    than 2 jointly scored assets are skipped and counted; degenerate
    (constant) weeks score 0 and are flagged.  Raises when no week is
    scoreable.
    """
    validate_keyed_table(predictions, "predictions")
    if "score" not in predictions.columns:
        raise InvalidInputError("predictions table: missing column 'score'")
    start, end = scheme.period_range(period)
    weeks = sorted(w for w in weeks if start <= w <= end)
    joined = predictions.merge(targets[KEY_COLUMNS + ["target"]], on=KEY_COLUMNS, how="inner")
    by_week = {w: g for w, g in joined.groupby("week", sort=False)}
    scored_weeks: list[dt.date] = []
    corrs: list[float] = []
    flags: list[bool] = []
    skipped = 0
    for w in weeks:
        group = by_week.get(w.isoformat(), by_week.get(w))
        if group is None or len(group) < 2:
            skipped += 1
            continue
        corr, degenerate = _spearman_with_flag(
            group["score"].to_numpy(dtype=float), group["target"].to_numpy(dtype=float)
        )
        scored_weeks.append(w)
        corrs.append(corr)
        flags.append(degenerate)
    if not scored_weeks:
        raise InvalidInputError(f"{scheme.name} {period}: no scoreable weeks")
    series = CorrSeries(tuple(scored_weeks), np.array(corrs), tuple(flags))
    return strategy_report(series, n_skipped_weeks=skipped), series
