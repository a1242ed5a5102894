"""Weekly tabular dataset assembly and cross-sectional rank quantization.

Tables are pandas DataFrames with key columns (week, asset_id) and named
feature columns; one week is one cross-section.  Monthly financial data is
forward-filled onto weekly anchors using the latest month-end strictly
before each anchor (no look-ahead), features are inner-joined on the week's
universe membership, and every column is rank-binned into five quantile
buckets {-2..2} within its week.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

KEY_COLUMNS = ["week", "asset_id"]
N_BINS = 5


def validate_keyed_table(df: pd.DataFrame, what: str) -> None:
    for col in KEY_COLUMNS:
        if col not in df.columns:
            raise InvalidInputError(f"{what}: missing key column '{col}'")
    if df.duplicated(KEY_COLUMNS).any():
        dupes = df[df.duplicated(KEY_COLUMNS)].iloc[0]
        raise InvalidInputError(
            f"{what}: duplicate (week, asset_id) key ({dupes['week']}, {dupes['asset_id']})"
        )


def feature_columns(df: pd.DataFrame) -> list[str]:
    return [c for c in df.columns if c not in KEY_COLUMNS]


def resample_financials(monthly: pd.DataFrame, anchors: list) -> pd.DataFrame:
    """Monthly rows onto weekly anchors: latest month-end strictly before.

    ``monthly`` needs columns (asset_id, month_end, value columns...).
    Assets with no prior month-end at an anchor are absent that week.
    """
    for col in ("asset_id", "month_end"):
        if col not in monthly.columns:
            raise InvalidInputError(f"financials table: missing column '{col}'")
    if monthly.duplicated(["asset_id", "month_end"]).any():
        raise InvalidInputError("financials table: duplicate (asset_id, month_end) key")
    monthly = monthly.sort_values(["month_end", "asset_id"], kind="mergesort")
    weeks = pd.DataFrame(
        [(w, a) for w in sorted(anchors) for a in sorted(monthly["asset_id"].unique())],
        columns=["week", "asset_id"],
    )
    merged = pd.merge_asof(
        weeks,
        monthly.rename(columns={"month_end": "week"}),
        on="week",
        by="asset_id",
        direction="backward",
        allow_exact_matches=False,
    )
    value_cols = [c for c in monthly.columns if c not in ("asset_id", "month_end")]
    merged = merged.dropna(subset=value_cols, how="all").reset_index(drop=True)
    return merged[KEY_COLUMNS + value_cols]


def _quantize_column(values: np.ndarray, n_bins: int = N_BINS) -> tuple[np.ndarray, bool]:
    """Average-rank a week's column into contiguous bins mapped to -2..2.

    Bin edges sit at ranks n/5, 2n/5, ...; a tie group whose average rank
    lands exactly on an edge goes wholly to the lower bin.  Returns the
    quantized column (NaN preserved) and a flag set when fewer than n_bins
    non-missing values forced the all-zero fallback.
    """
    out = np.full(values.shape[0], np.nan)
    present = ~np.isnan(values)
    n = int(present.sum())
    if n == 0:
        return out, False
    if n < n_bins:
        out[present] = 0.0
        return out, True
    ranks = rankdata(values[present], method="average")
    double_ranks = np.rint(2.0 * ranks).astype(np.int64)  # average ranks are multiples of 1/2
    bins = (n_bins * double_ranks + 2 * n - 1) // (2 * n) - 1  # ceil(q*r/n) - 1, exact in ints
    out[present] = bins - (n_bins - 1) // 2
    return out, False


def rank_quantize(table: pd.DataFrame, n_bins: int = N_BINS) -> tuple[pd.DataFrame, int]:
    """Quantize every feature column within every week; keys pass through.

    ``n_bins`` must be odd so the bins map onto centered integers (default
    5 -> {-2..2}).  Returns the quantized table and the number of
    (week, column) groups that fell back to all-zero for lack of data.
    """
    if n_bins < 3 or n_bins % 2 == 0:
        raise InvalidInputError(f"quantile count must be an odd integer >= 3, got {n_bins}")
    validate_keyed_table(table, "feature table")
    cols = feature_columns(table)
    out = table.copy()
    fallbacks = 0
    for _, block_idx in table.groupby("week", sort=False).groups.items():
        block = table.loc[block_idx, cols].to_numpy(dtype=float)
        quantized = np.empty_like(block)
        for j in range(block.shape[1]):
            quantized[:, j], fell_back = _quantize_column(block[:, j], n_bins)
            fallbacks += int(fell_back)
        out.loc[block_idx, cols] = quantized
    return out, fallbacks


@dataclass(frozen=True)
class AssembleResult:
    table: pd.DataFrame
    drop_counts: dict[str, int]  # universe rows dropped per missing family


def assemble(
    families: dict[str, pd.DataFrame],
    universe: pd.DataFrame,
    weeks: list | None = None,
) -> AssembleResult:
    """Inner-join feature families on the weekly universe membership.

    A (week, asset) row survives only if present in the universe and in
    every requested family; per-family counts of dropped universe rows are
    returned as metadata.  An empty result is valid.
    """
    if not families:
        raise InvalidInputError("assemble needs at least one feature family")
    validate_keyed_table(universe, "universe")
    base = universe[KEY_COLUMNS].drop_duplicates()
    if weeks is not None:
        wanted = set(weeks)
        base = base[base["week"].isin(wanted)]
    joined = base.copy()
    drop_counts: dict[str, int] = {}
    for name, df in families.items():
        validate_keyed_table(df, f"family '{name}'")
        before = len(joined)
        joined = joined.merge(df, on=KEY_COLUMNS, how="inner")
        drop_counts[name] = before - len(joined)
        if drop_counts[name]:
            logger.info("assemble: family '%s' dropped %d universe rows", name, drop_counts[name])
    joined = joined.sort_values(KEY_COLUMNS, kind="mergesort").reset_index(drop=True)
    return AssembleResult(table=joined, drop_counts=drop_counts)


def validate_targets(targets: pd.DataFrame) -> None:
    validate_keyed_table(targets, "targets")
    if "target" not in targets.columns:
        raise InvalidInputError("targets table: missing column 'target'")
    vals = targets["target"].to_numpy(dtype=float)
    bad = ~((vals >= 0.0) & (vals <= 1.0))
    if bad.any():
        raise InvalidInputError(f"targets: {int(bad.sum())} values outside [0, 1]")
