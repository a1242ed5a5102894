"""Independent slow oracles used to validate the production implementations.

Everything here follows the literal mathematical definition (nested sums,
exhaustive search, fine-grid quadrature) and deliberately avoids the code
paths of the package (FFT autocorrelation, compiled kernels, Chen products,
closed-form rank binning).
"""

from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# Signatures: iterated Riemann-Stieltjes sums on a fine grid
# ---------------------------------------------------------------------------

def riemann_signature(points: np.ndarray, depth: int, subdivisions: int = 100_000) -> list[np.ndarray]:
    """Iterated-integral signature of a piecewise-linear path by quadrature.

    Returns one flat array per level (lexicographic multi-index order),
    computed with left Riemann-Stieltjes sums on a uniformly refined grid.
    """
    points = np.asarray(points, dtype=float)
    t, d = points.shape
    grid = np.linspace(0.0, t - 1.0, subdivisions + 1)
    left = np.clip(np.floor(grid).astype(int), 0, t - 2)
    frac = grid - left
    fine = points[left] + frac[:, None] * (points[left + 1] - points[left])
    dx = np.diff(fine, axis=0)  # (N, d)

    levels = []
    # prev[w, j] = value of the length-(n-1) iterated integral w at grid j
    prev = np.ones((1, subdivisions + 1))
    for _ in range(depth):
        increments = prev[:, :-1, None] * dx[None, :, :]  # (d^{n-1}, N, d)
        cums = np.cumsum(increments, axis=1)
        nxt = np.zeros((prev.shape[0] * d, subdivisions + 1))
        nxt[:, 1:] = cums.transpose(0, 2, 1).reshape(prev.shape[0] * d, subdivisions)
        levels.append(nxt[:, -1].copy())
        prev = nxt
    return levels


# ---------------------------------------------------------------------------
# Rank statistics
# ---------------------------------------------------------------------------

def average_ranks_quadratic(x: np.ndarray) -> np.ndarray:
    """1-based average ranks by pairwise counting (quadratic, tie-aware)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    ranks = np.empty(n)
    for i in range(n):
        less = sum(1 for j in range(n) if x[j] < x[i])
        equal = sum(1 for j in range(n) if x[j] == x[i])
        ranks[i] = less + (equal + 1) / 2.0
    return ranks


def spearman_oracle(pred: np.ndarray, target: np.ndarray) -> float:
    rp = average_ranks_quadratic(pred)
    rt = average_ranks_quadratic(target)
    a = rp - rp.mean()
    b = rt - rt.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom == 0.0:
        return 0.0
    return float((a * b).sum() / denom)


def max_drawdown_oracle(corrs: np.ndarray) -> float:
    """Exhaustive search over peak/trough index pairs, zero-anchored."""
    prefix = [0.0]
    for c in corrs:
        prefix.append(prefix[-1] + c)
    best = 0.0
    for i in range(len(prefix)):
        for j in range(i, len(prefix)):
            best = max(best, prefix[i] - prefix[j])
    return best


def quantize_oracle(values: np.ndarray, n_bins: int = 5) -> np.ndarray:
    """Rank binning by sorting with stable tie grouping.

    Walks the sorted order, assigns each tie group the bin of its average
    rank with edges at multiples of n/n_bins (exact edge goes to the lower
    bin).
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    order = sorted(range(n), key=lambda i: values[i])
    out = np.empty(n)
    i = 0
    while i < n:
        j = i
        while j < n and values[order[j]] == values[order[i]]:
            j += 1
        avg_rank = (i + 1 + j) / 2.0  # mean of 1-based ranks i+1 .. j
        b = 0
        while avg_rank > (b + 1) * n / n_bins + 1e-12:
            b += 1
        for k in range(i, j):
            out[order[k]] = b - (n_bins - 1) // 2
        i = j
    return out


# ---------------------------------------------------------------------------
# Moments from raw power sums
# ---------------------------------------------------------------------------

def moments_oracle(x: np.ndarray) -> tuple[float, float, float, float]:
    x = np.asarray(x, dtype=float)
    k = x.shape[0]
    s1 = float(np.sum(x))
    s2 = float(np.sum(x ** 2))
    s3 = float(np.sum(x ** 3))
    s4 = float(np.sum(x ** 4))
    mu = s1 / k
    m2 = s2 / k - mu ** 2
    m3 = s3 / k - 3 * mu * s2 / k + 2 * mu ** 3
    m4 = s4 / k - 4 * mu * s3 / k + 6 * mu ** 2 * s2 / k - 3 * mu ** 4
    if m2 <= 0:
        return mu, max(m2, 0.0), 0.0, 0.0
    return mu, m2, m3 / m2 ** 1.5, m4 / m2 ** 2 - 3.0


# ---------------------------------------------------------------------------
# Literal catch22 oracle (pinned definitions from the kernel module docs)
# ---------------------------------------------------------------------------

def _acf(y: np.ndarray) -> np.ndarray:
    n = len(y)
    c = y - y.mean()
    denom = float((c * c).sum())
    out = np.zeros(n)
    out[0] = 1.0
    if denom <= 0:
        return out
    for tau in range(1, n):
        out[tau] = float((c[: n - tau] * c[tau:]).sum()) / denom
    return out


def _slice_corr(y: np.ndarray, tau: int) -> float:
    a = y[: len(y) - tau]
    b = y[tau:]
    if len(a) < 2:
        return 0.0
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    if denom <= 0:
        return 0.0
    return float((a * b).sum() / denom)


def _first_zero(acf: np.ndarray, maxtau: int) -> int:
    limit = min(maxtau, len(acf))
    for tau in range(1, limit):
        if acf[tau] <= 0:
            return tau
    return limit


def _hist_mode(y: np.ndarray, nbins: int) -> float:
    lo, hi = y.min(), y.max()
    width = (hi - lo) / nbins
    bins = np.minimum(((y - lo) / width).astype(int), nbins - 1)
    counts = np.bincount(np.maximum(bins, 0), minlength=nbins)
    centers = [lo + width * (b + 0.5) for b in range(nbins) if counts[b] == counts.max()]
    return float(np.mean(centers))


def _longstretch(flags: np.ndarray) -> float:
    best = cur = 0
    for f in flags:
        cur = cur + 1 if f else 0
        best = max(best, cur)
    return float(best)


def _outlier_mdrmd(y: np.ndarray, sign: float) -> float:
    n = len(y)
    work = sign * y
    maxval = work.max()
    if maxval < 0.01:
        return 0.0
    nthresh = int(maxval / 0.01) + 1
    gap_nan, pct, med = [], [], []
    for j in range(nthresh):
        positions = np.flatnonzero(work >= j * 0.01) + 1  # 1-based
        gap_nan.append(len(positions) < 2)
        pct.append((len(positions) - 1) * 100.0 / n)
        med.append(float(np.median(positions)) / (n / 2.0) - 1.0)
    mj = 0
    for j in range(nthresh):
        if pct[j] > 2.0:
            mj = j
    fbi = nthresh - 1
    for j in range(nthresh - 1, -1, -1):
        if gap_nan[j]:
            fbi = j
    trim = min(mj, fbi)
    return float(np.median(med[: trim + 1]))


def _welch(y: np.ndarray) -> tuple[float, float]:
    n = len(y)
    nfft = 256
    while nfft < n:
        nfft *= 2
    centered = np.concatenate([y - y.mean(), np.zeros(nfft - n)])
    j = np.arange(nfft)
    # literal DFT
    spectrum = np.array([
        complex(
            (centered * np.cos(-2 * np.pi * k * j / nfft)).sum(),
            (centered * np.sin(-2 * np.pi * k * j / nfft)).sum(),
        )
        for k in range(nfft // 2 + 1)
    ])
    power = np.abs(spectrum) ** 2 / n
    power[1: nfft // 2] *= 2.0
    s = power / (2 * np.pi)
    dw = 2 * np.pi / nfft
    area = float(s[: len(s) // 5].sum() * dw)
    cum = np.cumsum(s)
    half = cum[-1] * 0.5
    centroid = 0.0
    for k in range(len(s)):
        if cum[k] > half:
            centroid = dw * k
            break
    return area, centroid


def _hazen_quantile(y: np.ndarray, q: float) -> float:
    ys = np.sort(y)
    pos = q * len(ys) - 0.5
    if pos <= 0:
        return float(ys[0])
    if pos >= len(ys) - 1:
        return float(ys[-1])
    left = int(np.floor(pos))
    return float(ys[left] + (pos - left) * (ys[left + 1] - ys[left]))


def _coarsegrain3(y: np.ndarray) -> np.ndarray:
    th1 = _hazen_quantile(y, 1 / 3)
    th2 = _hazen_quantile(y, 2 / 3)
    return np.where(y <= th1, 0, np.where(y <= th2, 1, 2))


def _pair_entropy(labels: np.ndarray) -> float:
    pairs = {}
    for a, b in zip(labels[:-1], labels[1:]):
        pairs[(a, b)] = pairs.get((a, b), 0) + 1
    total = len(labels) - 1
    return float(-sum((c / total) * np.log(c / total) for c in pairs.values()))


def _ami_even_2_5(y: np.ndarray) -> float:
    edges = np.linspace(y.min(), y.max(), 6)
    edges[0] -= 0.1
    edges[-1] += 0.1
    b1 = np.searchsorted(edges, y[:-2], side="right") - 1
    b2 = np.searchsorted(edges, y[2:], side="right") - 1
    joint = np.zeros((5, 5))
    for a, b in zip(b1, b2):
        joint[a, b] += 1
    joint /= len(b1)
    pi = joint.sum(axis=1)
    pj = joint.sum(axis=0)
    ami = 0.0
    for i in range(5):
        for j in range(5):
            if joint[i, j] > 0:
                ami += joint[i, j] * np.log(joint[i, j] / (pi[i] * pj[j]))
    return float(ami)


def _fmmi(y: np.ndarray) -> float:
    taumax = min(40, int(np.ceil(len(y) / 2)))
    ami = []
    for tau in range(1, taumax + 1):
        rho = _slice_corr(y, tau)
        ami.append(-0.5 * np.log(max(1.0 - rho * rho, 1e-15)))
    for j in range(1, taumax - 1):
        if ami[j] < ami[j - 1] and ami[j] < ami[j + 1]:
            return float(j + 1)
    return float(taumax)


def _embed2_expfit_meandiff(y: np.ndarray, tau: int) -> float:
    n = len(y)
    tau = min(tau, n // 10)
    tau = max(tau, 1)
    nd = n - tau - 1
    if nd < 3:
        return 0.0
    d = np.sqrt(np.diff(y)[:nd] ** 2 + (y[tau + 1: tau + 1 + nd] - y[tau: tau + nd]) ** 2)
    lam = d.mean()
    sd = d.std(ddof=1)
    if sd < 0.001:
        return 0.0
    nbins = int(np.ceil((d.max() - d.min()) / (3.5 * sd / nd ** (1 / 3))))
    if nbins <= 0:
        return 0.0
    bw = (d.max() - d.min()) / nbins
    bins = np.minimum(((d - d.min()) / bw).astype(int), nbins - 1)
    counts = np.bincount(np.maximum(bins, 0), minlength=nbins).astype(float)
    centers = d.min() + bw * (np.arange(nbins) + 0.5)
    fitted = np.exp(-centers / lam) / lam
    empirical = counts / (nd * bw)
    return float(np.mean(np.abs(empirical - fitted)))


def _fluct_anal(y: np.ndarray, method: str) -> float:
    n = len(y)
    grid = np.linspace(np.log(5.0), np.log(float(n // 2)), 50)
    taus = []
    for g in grid:
        t = int(np.floor(np.exp(g) + 0.5))
        if not taus or taus[-1] != t:
            taus.append(t)
    if len(taus) < 12:
        return 0.0
    ycs = np.cumsum(y)
    logff = []
    for tau in taus:
        nbuf = n // tau
        t = np.arange(tau, dtype=float)
        f = 0.0
        for j in range(nbuf):
            seg = ycs[j * tau:(j + 1) * tau]
            slope, inter = np.polyfit(t, seg, 1)
            resid = seg - (slope * t + inter)
            if method == "dfa":
                f += float((resid ** 2).sum())
            else:
                f += float((resid.max() - resid.min()) ** 2)
        val = np.sqrt(f / (nbuf * tau)) if method == "dfa" else np.sqrt(f / nbuf)
        if val <= 0:
            return 0.0
        logff.append(np.log(val))
    logtt = np.log(np.array(taus, dtype=float))
    logff = np.array(logff)
    ntau = len(taus)

    def resid_norm(xs, ys):
        slope, inter = np.polyfit(xs, ys, 1)
        return float(np.sqrt(((ys - (slope * xs + inter)) ** 2).sum()))

    best, besti = np.inf, 6
    for ipts in range(6, ntau - 5):
        sse = resid_norm(logtt[:ipts], logff[:ipts]) + resid_norm(logtt[ipts - 1:], logff[ipts - 1:])
        if sse < best:
            best, besti = sse, ipts
    return besti / ntau


def _transition_sumdiagcov(y: np.ndarray, tau: int) -> float:
    tau = max(tau, 1)
    ydown = y[::tau]
    if len(ydown) < 2 or ydown.max() == ydown.min():
        return 0.0
    labels = _coarsegrain3(ydown)
    tmat = np.zeros((3, 3))
    for a, b in zip(labels[:-1], labels[1:]):
        tmat[a, b] += 1
    tmat /= len(ydown) - 1
    return float(sum(np.var(tmat[:, j], ddof=1) for j in range(3)))


def _spline_detrend(y: np.ndarray) -> np.ndarray:
    n = len(y)
    t = np.arange(n) / (n - 1.0)
    design = np.column_stack([
        np.ones(n), t, t ** 2, t ** 3, np.where(t > 0.5, (t - 0.5) ** 3, 0.0)
    ])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return y - design @ coef


def _periodicity_wang(y: np.ndarray) -> float:
    ysub = _spline_detrend(y)
    acmax = int(np.ceil(len(y) / 3))
    acf = np.array([_slice_corr(ysub, tau) for tau in range(1, acmax + 1)])
    troughs = [i for i in range(1, acmax - 1) if acf[i] < acf[i - 1] and acf[i] < acf[i + 1]]
    peaks = [i for i in range(1, acmax - 1) if acf[i] > acf[i - 1] and acf[i] > acf[i + 1]]
    for ip in peaks:
        before = [it for it in troughs if it < ip]
        if not before:
            continue
        it = before[-1]
        if acf[ip] - acf[it] >= 0.01 and acf[ip] > 0:
            return float(ip + 1)
    return 1.0


def catch22_oracle(x: np.ndarray) -> np.ndarray:
    """All 22 features by their literal definitions, canonical order."""
    x = np.asarray(x, dtype=float)
    y = (x - x.mean()) / x.std()
    n = len(y)
    acf = _acf(y)
    diffs = np.diff(y)
    tau_fz = _first_zero(acf, n)

    out = np.empty(22)
    out[0] = _hist_mode(y, 5)
    out[1] = _hist_mode(y, 10)
    out[2] = _longstretch(diffs < 0)
    out[3] = _outlier_mdrmd(y, 1.0)
    out[4] = _outlier_mdrmd(y, -1.0)
    # first 1/e crossing with linear interpolation
    out[5] = float(n)
    for i in range(n - 1):
        if acf[i + 1] < 1 / np.e:
            out[5] = i + (1 / np.e - acf[i]) / (acf[i + 1] - acf[i])
            break
    out[6] = float(n)
    for i in range(1, n - 1):
        if acf[i] < acf[i - 1] and acf[i] < acf[i + 1]:
            out[6] = float(i)
            break
    out[7], out[8] = _welch(y)
    fc_resid = np.array([y[i + 3] - y[i: i + 3].mean() for i in range(n - 3)])
    out[9] = float(fc_resid.std(ddof=1))
    out[10] = float((diffs ** 3).mean())
    out[11] = _ami_even_2_5(y)
    out[12] = _fmmi(y)
    out[13] = float((np.abs(diffs) > 0.04).mean())
    out[14] = _longstretch(y - y.mean() > 0)
    out[15] = _pair_entropy(_coarsegrain3(y))
    out[16] = _first_zero(_acf(diffs), n - 1) / _first_zero(acf, n)
    out[17] = _embed2_expfit_meandiff(y, tau_fz)
    out[18] = _fluct_anal(y, "dfa")
    out[19] = _fluct_anal(y, "rsrange")
    out[20] = _transition_sumdiagcov(y, tau_fz)
    out[21] = _periodicity_wang(y)
    return out
