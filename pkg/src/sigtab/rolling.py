"""Sliding-window log-signatures via cached segment signatures.

Each window's signature is a fresh product of the window's per-segment
signatures, combined through a fixed balanced reduction tree (no incremental
inverse updates), so results are deterministic, independent of batching, and
numerically equal to recomputing every window from scratch.  Windows are
processed in vectorized chunks for throughput.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .lyndon import LogSignature, lyndon_basis
from .series import LookbackWindow, MultivariateSeries
from .signature import (
    PiecewiseLinearPath,
    _batch_fold_balanced,
    _batch_log,
    _batch_segment_exp,
)

DEFAULT_WINDOWS = (21, 63, 252)
DEFAULT_DEPTH = 4

_CHUNK = 128


def rolling_log_signature_matrix(
    points: np.ndarray,
    window: int,
    depth: int,
    at_positions: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Log-signature coordinates of trailing windows of a sampled path.

    ``points`` is (T, d); a window at position i covers samples
    [i - window + 1, i].  Returns (positions, coords) where coords is
    (len(positions), n_coords).  Positions default to every full window.
    """
    points = np.asarray(points, dtype=float)
    t, dim = points.shape
    k = window
    if at_positions is None:
        positions = np.arange(k - 1, t)
    else:
        positions = np.asarray(at_positions, dtype=int)
        if positions.size and (positions.min() < k - 1 or positions.max() >= t):
            raise InvalidInputError("window positions out of range for this path")
    if k > t:
        return np.empty(0, dtype=int), np.empty((0, _n_coords(dim, depth)))
    basis = lyndon_basis(dim, depth)
    incr = np.diff(points, axis=0)  # segment s covers samples s..s+1
    seg_levels = _batch_segment_exp(incr, depth)
    out = np.empty((positions.shape[0], _n_coords(dim, depth)))
    for lo in range(0, positions.shape[0], _CHUNK):
        chunk = positions[lo:lo + _CHUNK]
        starts = chunk - (k - 1)  # first segment of each window
        gather = starts[:, None] + np.arange(k - 1)[None, :]
        stacked = [lv[gather] for lv in seg_levels]
        folded = _batch_fold_balanced(stacked, dim)
        logs = _batch_log(folded, dim)
        out[lo:lo + _CHUNK] = basis.project(logs)
    return positions, out


def rolling_log_signature(
    path: PiecewiseLinearPath,
    window: LookbackWindow,
    depth: int = DEFAULT_DEPTH,
) -> list[tuple[int, LogSignature]]:
    """One (as-of index, LogSignature) per full trailing window of the path."""
    positions, coords = rolling_log_signature_matrix(path.points, window.k, depth)
    return [
        (int(i), LogSignature(dim=path.dim, depth=depth, coords=c))
        for i, c in zip(positions, coords)
    ]


def _n_coords(dim: int, depth: int) -> int:
    return sum(lyndon_basis(dim, depth).level_sizes)


def signature_feature_names(
    windows=DEFAULT_WINDOWS, depth: int = DEFAULT_DEPTH, dim: int = 3
) -> list[str]:
    labels = lyndon_basis(dim, depth).word_labels()
    return [f"signature.{label}.w{k}" for k in windows for label in labels]


def signature_feature_matrix(
    history: MultivariateSeries,
    asof_indices: list[int],
    windows=DEFAULT_WINDOWS,
    depth: int = DEFAULT_DEPTH,
) -> np.ndarray:
    """Log-signature features of the fully-present price path at as-of rows.

    A window of size k needs k fully-present path rows ending at the as-of
    row; rows with insufficient history are all-NaN (caller drops them).
    """
    present = history.fully_present_rows()
    first = int(np.argmax(present)) if present.any() else len(present)
    if not present[first:].all():
        raise InvalidInputError(f"{history.asset_id}: present rows are not contiguous")
    points = history.values[first:]
    idx = np.asarray(asof_indices, dtype=int)
    pos = idx - first  # position within the trimmed path
    dim = points.shape[1]
    width = _n_coords(dim, depth)
    out = np.full((idx.shape[0], width * len(windows)), np.nan)
    for wi, k in enumerate(windows):
        ok = pos >= k - 1
        if not ok.any():
            continue
        _, coords = rolling_log_signature_matrix(points, k, depth, at_positions=pos[ok])
        out[ok, wi * width:(wi + 1) * width] = coords
    out[pos < max(windows) - 1, :] = np.nan
    return out


def signature_feature_row(
    history: MultivariateSeries,
    asof_index: int,
    windows=DEFAULT_WINDOWS,
    depth: int = DEFAULT_DEPTH,
) -> dict[str, float] | None:
    """96 named features (32 log-signature coords x 3 windows), or None."""
    mat = signature_feature_matrix(history, [asof_index], windows, depth)
    if np.isnan(mat).any():
        return None
    names = signature_feature_names(windows, depth, dim=len(history.channels))
    return dict(zip(names, mat[0].tolist()))
