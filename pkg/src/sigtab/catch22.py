"""The canonical 22-feature set, applied per look-back window of log price.

Every window is z-scored (population sigma) before the features are
computed, which makes the vector exactly invariant under positive affine
maps of the input.  A zero-variance window, or one shorter than 22 points,
takes the documented degenerate vector (all zeros) in feature rows; the
standalone transform signals missing data with None instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._catch22_kernels import catch22_kernel
from .errors import InvalidInputError
from .series import MultivariateSeries

DEFAULT_WINDOWS = (21, 63, 252)

MIN_LENGTH = 22  # guard for embedding/lag-based features

CATCH22_NAMES = (
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "SB_BinaryStats_diff_longstretch0",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "SP_Summaries_welch_rect_area_5_1",
    "SP_Summaries_welch_rect_centroid",
    "FC_LocalSimple_mean3_stderr",
    "CO_trev_1_num",
    "CO_HistogramAMI_even_2_5",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_mean_longstretch1",
    "SB_MotifThree_quantile_hh",
    "FC_LocalSimple_mean1_tauresrat",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
)

# contract: zero-variance (or too-short, in feature rows) windows map here
DEGENERATE_VALUES = np.zeros(22)


@dataclass(frozen=True)
class Catch22Vector:
    values: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (22,):
            raise InvalidInputError(f"expected 22 values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(CATCH22_NAMES, self.values.tolist()))

    def __getitem__(self, name: str) -> float:
        return float(self.values[CATCH22_NAMES.index(name)])


def catch22(x: np.ndarray) -> Catch22Vector | None:
    """Feature vector of one series; None when fewer than 22 values."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidInputError(f"expected a 1-d series, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("series contains non-finite values")
    if x.shape[0] < MIN_LENGTH:
        return None
    values, degenerate = _values_or_degenerate(x)
    return Catch22Vector(values=values, degenerate=degenerate)


def _values_or_degenerate(x: np.ndarray) -> tuple[np.ndarray, bool]:
    sd = float(np.std(x))
    if sd == 0.0 or x.shape[0] < MIN_LENGTH:
        return DEGENERATE_VALUES.copy(), True
    z = (x - x.mean()) / sd
    return catch22_kernel(np.ascontiguousarray(z)), False


def catch22_feature_names(windows=DEFAULT_WINDOWS) -> list[str]:
    return [f"catch22.{name}.w{k}" for k in windows for name in CATCH22_NAMES]


def catch22_feature_matrix(
    history: MultivariateSeries,
    asof_indices: list[int],
    windows=DEFAULT_WINDOWS,
) -> np.ndarray:
    """Catch22 features of the log price level at several as-of rows.

    A window of size k uses the k prices ending at the as-of row; windows
    shorter than 22 points take the degenerate vector, rows without the
    largest window's history are all-NaN (caller drops them).
    """
    logp = history.channel("log_price")
    idx = np.asarray(asof_indices, dtype=int)
    out = np.full((idx.shape[0], 22 * len(windows)), np.nan)
    for wi, k in enumerate(windows):
        for row, i in enumerate(idx):
            if i < k - 1:
                continue
            if k < MIN_LENGTH:
                out[row, 22 * wi: 22 * wi + 22] = DEGENERATE_VALUES
                continue
            values, _ = _values_or_degenerate(logp[i - k + 1: i + 1])
            out[row, 22 * wi: 22 * wi + 22] = values
    out[idx < max(windows) - 1, :] = np.nan
    return out


def catch22_feature_row(
    history: MultivariateSeries,
    asof_index: int,
    windows=DEFAULT_WINDOWS,
) -> dict[str, float] | None:
    """66 named features (22 x 3 windows) at one as-of date, or None."""
    mat = catch22_feature_matrix(history, [asof_index], windows)
    if np.isnan(mat).any():
        return None
    return dict(zip(catch22_feature_names(windows), mat[0].tolist()))
