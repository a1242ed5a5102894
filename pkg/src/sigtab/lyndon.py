"""Lyndon-word basis of the free Lie algebra and log-signature projection.

Log signatures live in the free Lie algebra; we express them in the classic
Lyndon basis (standard-factorization bracketing, words ordered by level then
lexicographically).  Projection exploits the triangularity of bracketed
Lyndon words: the expansion of the bracketing of w equals w plus a
combination of lexicographically larger words, so restricting the expansion
matrix to Lyndon-word columns gives a unitriangular system.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidInputError
from .signature import GradedTensor, tensor_exp, tensor_log


def witt_number(dim: int, n: int) -> int:
    """Dimension of level n of the free Lie algebra on dim generators."""
    total = 0
    for k in _divisors(n):
        total += _mobius(k) * dim ** (n // k)
    return total // n


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _mobius(n: int) -> int:
    if n == 1:
        return 1
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def lyndon_words(dim: int, depth: int) -> list[tuple[int, ...]]:
    """All Lyndon words over {0..dim-1} of length 1..depth, by level then lex."""
    words: list[tuple[int, ...]] = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m <= depth:
            words.append(tuple(w))
        while len(w) < depth:
            w.append(w[-m])
        while w and w[-1] == dim - 1:
            w.pop()
    return sorted(words, key=lambda t: (len(t), t))


def standard_bracketing(word: tuple[int, ...]):
    """Right-standard factorization bracketing of a Lyndon word."""
    if len(word) == 1:
        return word[0]
    # longest proper Lyndon suffix
    for i in range(1, len(word)):
        suffix = word[i:]
        if _is_lyndon(suffix):
            return (standard_bracketing(word[:i]), standard_bracketing(suffix))
    raise AssertionError(f"no Lyndon suffix found for {word}")  # unreachable on Lyndon input


def _is_lyndon(word: tuple[int, ...]) -> bool:
    return all(word < word[i:] + word[:i] for i in range(1, len(word)))


def _expand_bracket(bracket) -> dict[tuple[int, ...], float]:
    """Tensor-algebra expansion of a nested bracket: [a,b] = ab - ba."""
    if isinstance(bracket, int):
        return {(bracket,): 1.0}
    left = _expand_bracket(bracket[0])
    right = _expand_bracket(bracket[1])
    out: dict[tuple[int, ...], float] = {}
    for wa, ca in left.items():
        for wb, cb in right.items():
            out[wa + wb] = out.get(wa + wb, 0.0) + ca * cb
            out[wb + wa] = out.get(wb + wa, 0.0) - ca * cb
    return {w: c for w, c in out.items() if c != 0.0}


def _word_index(word: tuple[int, ...], dim: int) -> int:
    idx = 0
    for letter in word:
        idx = idx * dim + letter
    return idx


@dataclass(frozen=True)
class LyndonBasis:
    """Per-(dim, depth) basis data: words, expansions, projection matrices."""

    dim: int
    depth: int
    words: tuple[tuple[int, ...], ...]
    level_sizes: tuple[int, ...]
    # per level: positions of the Lyndon words inside the d**n lex block, and
    # the unit-lower-triangular matrix of their bracket expansions restricted
    # to those positions
    _positions: tuple[np.ndarray, ...]
    _triangular: tuple[np.ndarray, ...]
    _expansions: tuple[np.ndarray, ...]

    def words_by_level(self, n: int) -> list[tuple[int, ...]]:
        return [w for w in self.words if len(w) == n]

    def word_labels(self) -> list[str]:
        """1-based digit strings, e.g. (0, 1, 2) -> '123'."""
        return ["".join(str(letter + 1) for letter in w) for w in self.words]

    def project(self, log_levels: list[np.ndarray]) -> np.ndarray:
        """Lyndon coordinates of batched Lie elements.

        ``log_levels[n]`` has shape (B, dim**n) and must hold a Lie element
        (e.g. a truncated tensor logarithm of a signature).  Returns
        (B, total) coordinates concatenated by level.
        """
        parts = []
        for n in range(1, self.depth + 1):
            pos = self._positions[n - 1]
            a = self._triangular[n - 1]
            rhs = log_levels[n][:, pos].T  # (nL, B)
            lam = solve_triangular(a, rhs, lower=True, unit_diagonal=True)
            parts.append(lam.T)
        return np.concatenate(parts, axis=1)

    def expand(self, coords: np.ndarray) -> list[np.ndarray]:
        """Inverse of project: Lyndon coordinates back to tensor levels."""
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        out = [np.zeros(coords.shape[0])]
        offset = 0
        for n in range(1, self.depth + 1):
            size = self.level_sizes[n - 1]
            lam = coords[:, offset:offset + size]
            out.append(lam @ self._expansions[n - 1])
            offset += size
        return out


@lru_cache(maxsize=None)
def lyndon_basis(dim: int, depth: int) -> LyndonBasis:
    if dim < 1 or depth < 1:
        raise InvalidInputError("dim and depth must be >= 1")
    words = lyndon_words(dim, depth)
    level_sizes = tuple(sum(1 for w in words if len(w) == n) for n in range(1, depth + 1))
    positions, triangulars, expansions = [], [], []
    for n in range(1, depth + 1):
        level_words = [w for w in words if len(w) == n]
        pos = np.array([_word_index(w, dim) for w in level_words], dtype=int)
        exp_rows = np.zeros((len(level_words), dim ** n))
        for j, w in enumerate(level_words):
            for word, coef in _expand_bracket(standard_bracketing(w)).items():
                exp_rows[j, _word_index(word, dim)] = coef
        # A[i, j] = coefficient of word_i in the expansion of bracket(word_j)
        a = exp_rows[:, pos].T
        positions.append(pos)
        triangulars.append(a)
        expansions.append(exp_rows)
    return LyndonBasis(
        dim=dim,
        depth=depth,
        words=tuple(words),
        level_sizes=level_sizes,
        _positions=tuple(positions),
        _triangular=tuple(triangulars),
        _expansions=tuple(expansions),
    )


@dataclass(frozen=True)
class LogSignature:
    """Log-signature coordinates in the Lyndon basis, concatenated by level."""

    dim: int
    depth: int
    coords: np.ndarray

    def __post_init__(self):
        basis = lyndon_basis(self.dim, self.depth)
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (sum(basis.level_sizes),):
            raise InvalidInputError(
                f"expected {sum(basis.level_sizes)} coordinates for dim {self.dim} depth {self.depth},"
                f" got {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def basis(self) -> LyndonBasis:
        return lyndon_basis(self.dim, self.depth)

    def __len__(self) -> int:
        return self.coords.shape[0]


def log_signature(sig: GradedTensor) -> LogSignature:
    """Tensor logarithm projected onto the Lyndon basis."""
    logt = tensor_log(sig)  # validates level0 == 1
    basis = lyndon_basis(sig.dim, sig.depth)
    levels = [np.array([0.0])] + [lv[None, :] for lv in logt.levels]
    coords = basis.project(levels)[0]
    return LogSignature(dim=sig.dim, depth=sig.depth, coords=coords)


def exp_log_signature(ls: LogSignature) -> GradedTensor:
    """Round trip: rebuild the signature tensor from Lyndon coordinates."""
    basis = ls.basis
    levels = basis.expand(ls.coords[None, :])
    lie = GradedTensor(
        dim=ls.dim, depth=ls.depth, level0=0.0, levels=tuple(lv[0] for lv in levels[1:])
    )
    return tensor_exp(lie)


def log_signature_labels(dim: int, depth: int) -> list[str]:
    """Stable coordinate labels (Lyndon words as 1-based digit strings)."""
    return lyndon_basis(dim, depth).word_labels()
