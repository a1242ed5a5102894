"""Truncated signatures of piecewise-linear paths in the tensor algebra.

A depth-m signature is stored as one dense coefficient block per level,
level n holding all d**n iterated-integral coefficients in lexicographic
multi-index order (level 0 is the scalar 1).  Products, logarithms and
exponentials are computed in the truncated algebra.  All internal kernels
are batched: level n arrays carry an arbitrary leading batch shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Sampled path with linear interpolation between samples."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[0] < 2 or p.shape[1] < 1:
            raise InvalidInputError(f"path needs >= 2 sample points in >= 1 dimensions, got shape {p.shape}")
        if t.shape != (p.shape[0],):
            raise InvalidInputError("times must be one value per sample point")
        if np.any(np.diff(t) <= 0):
            raise InvalidInputError("sample times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    @classmethod
    def from_samples(cls, points: np.ndarray) -> "PiecewiseLinearPath":
        points = np.asarray(points, dtype=float)
        return cls(times=np.arange(points.shape[0], dtype=float), points=points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)


@dataclass(frozen=True)
class GradedTensor:
    """Graded coefficients (level 0 scalar, level n a block of size d**n)."""

    dim: int
    depth: int
    level0: float
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.depth < 1 or self.dim < 1:
            raise InvalidInputError("dim and depth must be >= 1")
        if len(self.levels) != self.depth:
            raise InvalidInputError(f"expected {self.depth} level blocks, got {len(self.levels)}")
        blocks = []
        for n, block in enumerate(self.levels, start=1):
            block = np.asarray(block, dtype=float)
            if block.shape != (self.dim ** n,):
                raise InvalidInputError(f"level {n} block must have size {self.dim ** n}, got {block.shape}")
            block.setflags(write=False)
            blocks.append(block)
        object.__setattr__(self, "levels", tuple(blocks))

    @classmethod
    def identity(cls, dim: int, depth: int) -> "GradedTensor":
        return cls(dim, depth, 1.0, tuple(np.zeros(dim ** n) for n in range(1, depth + 1)))

    def level(self, n: int) -> np.ndarray:
        """Level-n block; n=0 returns the scalar as a 0-d view."""
        if n == 0:
            return np.asarray(self.level0)
        return self.levels[n - 1]

    def flat(self) -> np.ndarray:
        """All coefficients, level 1..depth concatenated (level 0 omitted)."""
        return np.concatenate(self.levels)

    def allclose(self, other: "GradedTensor", rtol: float = 1e-10, atol: float = 1e-12) -> bool:
        if (self.dim, self.depth) != (other.dim, other.depth):
            return False
        if not np.isclose(self.level0, other.level0, rtol=rtol, atol=atol):
            return False
        return all(
            np.allclose(a, b, rtol=rtol, atol=atol) for a, b in zip(self.levels, other.levels)
        )


# ---------------------------------------------------------------------------
# Batched kernels.  A "levels list" is [l0, l1, ..., lm] where l0 has shape
# (B,) and ln has shape (B, d**n).
# ---------------------------------------------------------------------------

def _batch_product(a: list[np.ndarray], b: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Truncated tensor product: out_n = sum_{p+q=n} a_p (x) b_q."""
    depth = len(a) - 1
    out = [a[0] * b[0]]
    for n in range(1, depth + 1):
        acc = a[n] * b[0][:, None] + a[0][:, None] * b[n]
        for p in range(1, n):
            q = n - p
            prod = np.einsum("bi,bj->bij", a[p], b[q])
            acc = acc + prod.reshape(acc.shape[0], dim ** n)
        out.append(acc)
    return out


def _batch_segment_exp(increments: np.ndarray, depth: int) -> list[np.ndarray]:
    """Signature of straight segments: level n = increment**(x)n / n!."""
    incr = np.asarray(increments, dtype=float)
    batch, dim = incr.shape
    out = [np.ones(batch), incr.copy()]
    for n in range(2, depth + 1):
        nxt = np.einsum("bi,bj->bij", out[-1], incr).reshape(batch, dim ** n) / n
        out.append(nxt)
    return out


def _batch_identity(batch: int, dim: int, depth: int) -> list[np.ndarray]:
    return [np.ones(batch)] + [np.zeros((batch, dim ** n)) for n in range(1, depth + 1)]


def _batch_fold_balanced(segments: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Product of S segment tensors per batch row via a fixed balanced tree.

    ``segments[n]`` has shape (B, S, d**n); adjacent pairs are combined each
    round, an odd trailing element is carried over, so the reduction tree
    depends only on S and the result is independent of batching.
    """
    depth = len(segments) - 1
    cur = segments
    s = cur[1].shape[1] if depth >= 1 else cur[0].shape[1]
    while s > 1:
        half = s // 2
        a = [lv[:, 0:2 * half:2].reshape(-1, *lv.shape[2:]) for lv in cur]
        b = [lv[:, 1:2 * half:2].reshape(-1, *lv.shape[2:]) for lv in cur]
        prod = _batch_product(a, b, dim)
        nxt = []
        for n, lv in enumerate(prod):
            shaped = lv.reshape(cur[n].shape[0], half, *cur[n].shape[2:])
            if s % 2:
                shaped = np.concatenate([shaped, cur[n][:, -1:]], axis=1)
            nxt.append(shaped)
        cur = nxt
        s = half + (s % 2)
    return [lv[:, 0] for lv in cur]


_LOG_COEFS_CACHE: dict[int, np.ndarray] = {}


def _batch_log(sig: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Tensor logarithm of signatures with level-0 coefficient 1."""
    depth = len(sig) - 1
    batch = sig[0].shape[0]
    u = [np.zeros(batch)] + [lv.copy() for lv in sig[1:]]
    out = [np.zeros(batch)] + [lv.copy() for lv in sig[1:]]
    power = u
    for n in range(2, depth + 1):
        power = _batch_product(power, u, dim)
        coef = (-1.0) ** (n - 1) / n
        for lvl in range(1, depth + 1):
            out[lvl] += coef * power[lvl]
    return out


def _batch_exp(v: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Tensor exponential of elements with level-0 coefficient 0."""
    depth = len(v) - 1
    batch = v[0].shape[0]
    out = _batch_identity(batch, dim, depth)
    power = v
    factorial = 1.0
    for n in range(1, depth + 1):
        factorial *= n
        for lvl in range(1, depth + 1):
            out[lvl] += power[lvl] / factorial
        if n < depth:
            power = _batch_product(power, v, dim)
    return out


def _to_levels(t: GradedTensor) -> list[np.ndarray]:
    return [np.array([t.level0])] + [lv[None, :].copy() for lv in t.levels]


def _from_levels(levels: list[np.ndarray], dim: int, row: int = 0) -> GradedTensor:
    return GradedTensor(
        dim=dim,
        depth=len(levels) - 1,
        level0=float(levels[0][row]),
        levels=tuple(lv[row] for lv in levels[1:]),
    )


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def signature(path: PiecewiseLinearPath, depth: int) -> GradedTensor:
    """Truncated signature of a piecewise-linear path.

    For a single segment with increment D, level n equals D**(x)n / n!; for
    multiple segments the per-segment signatures are combined with the
    truncated tensor product (a fixed balanced reduction over segments).
    """
    if depth < 1:
        raise InvalidInputError(f"signature depth must be >= 1, got {depth}")
    incr = path.increments()
    segs = _batch_segment_exp(incr, depth)
    stacked = [lv[None, ...] for lv in segs]  # batch of one path, S segments
    folded = _batch_fold_balanced(stacked, path.dim)
    return _from_levels(folded, path.dim)


def chen_concat(s1: GradedTensor, s2: GradedTensor) -> GradedTensor:
    """Signature of a concatenated path: truncated tensor product s1 (x) s2."""
    if (s1.dim, s1.depth) != (s2.dim, s2.depth):
        raise InvalidInputError(
            f"shape mismatch: ({s1.dim}, depth {s1.depth}) vs ({s2.dim}, depth {s2.depth})"
        )
    out = _batch_product(_to_levels(s1), _to_levels(s2), s1.dim)
    return _from_levels(out, s1.dim)


def tensor_log(sig: GradedTensor) -> GradedTensor:
    """Logarithm in the truncated tensor algebra (requires level0 == 1)."""
    if not math.isclose(sig.level0, 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise InvalidInputError(f"tensor log requires level-0 coefficient 1, got {sig.level0}")
    out = _batch_log(_to_levels(sig), sig.dim)
    return _from_levels(out, sig.dim)


def tensor_exp(v: GradedTensor) -> GradedTensor:
    """Exponential in the truncated tensor algebra (requires level0 == 0)."""
    if not math.isclose(v.level0, 0.0, rel_tol=0.0, abs_tol=1e-9):
        raise InvalidInputError(f"tensor exp requires level-0 coefficient 0, got {v.level0}")
    out = _batch_exp(_to_levels(v), v.dim)
    return _from_levels(out, v.dim)
