"""Compiled kernels for the 22 canonical time-series features.

All kernels operate on a z-scored (population sigma), non-constant window;
the wrapper in catch22.py enforces that contract and owns naming, ordering
and degenerate fallbacks.  Definitions pinned here (and mirrored by the
literal test oracle):

- ACF: biased estimator, demeaned, normalized so acf(0) = 1.
- Slice correlation at lag tau: Pearson correlation of y[:-tau] vs y[tau:].
- Histograms: equal-width bins between min and max, last bin right-closed.
- Quantiles: midpoint (Hazen) linear interpolation on the sorted sample.
- Spectrum: one full-length rectangular segment, nfft = max(256, next pow2),
  one-sided power normalized by the window length, expressed per unit
  angular frequency.
- Rounding of log-spaced scales: half away from zero.

Integer-valued outputs (run lengths, lag indices, scale proportions times
the scale count) are exact by construction.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _acf_full(y):
    n = y.shape[0]
    m = y.mean()
    c = y - m
    denom = (c * c).sum()
    acf = np.zeros(n)
    acf[0] = 1.0
    if denom <= 0.0:
        return acf
    for tau in range(1, n):
        s = 0.0
        for t in range(n - tau):
            s += c[t] * c[t + tau]
        acf[tau] = s / denom
    return acf


@njit(cache=True)
def _slice_corr(y, tau):
    n = y.shape[0] - tau
    if n < 2:
        return 0.0
    m1 = 0.0
    m2 = 0.0
    for i in range(n):
        m1 += y[i]
        m2 += y[i + tau]
    m1 /= n
    m2 /= n
    sxy = 0.0
    sxx = 0.0
    syy = 0.0
    for i in range(n):
        a = y[i] - m1
        b = y[i + tau] - m2
        sxy += a * b
        sxx += a * a
        syy += b * b
    if sxx <= 0.0 or syy <= 0.0:
        return 0.0
    return sxy / np.sqrt(sxx * syy)


@njit(cache=True)
def _histogram_mode(y, nbins):
    n = y.shape[0]
    lo = y.min()
    hi = y.max()
    width = (hi - lo) / nbins
    counts = np.zeros(nbins, dtype=np.int64)
    for i in range(n):
        b = int((y[i] - lo) / width)
        if b >= nbins:
            b = nbins - 1
        if b < 0:
            b = 0
        counts[b] += 1
    maxc = 0
    for b in range(nbins):
        if counts[b] > maxc:
            maxc = counts[b]
    num = 0
    acc = 0.0
    for b in range(nbins):
        if counts[b] == maxc:
            num += 1
            acc += lo + width * (b + 0.5)
    return acc / num


@njit(cache=True)
def _binarystats_diff_longstretch0(y):
    n = y.shape[0]
    best = 0
    cur = 0
    for i in range(n - 1):
        if y[i + 1] - y[i] < 0.0:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 0
    return float(best)


@njit(cache=True)
def _binarystats_mean_longstretch1(y):
    n = y.shape[0]
    m = y.mean()
    best = 0
    cur = 0
    for i in range(n):
        if y[i] - m > 0.0:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 0
    return float(best)


@njit(cache=True)
def _outlier_include_mdrmd(y, sign):
    """Median (over retained thresholds) of the centred median position of
    threshold exceedances; thresholds step 0.01 from 0 to the max."""
    n = y.shape[0]
    inc = 0.01
    work = np.empty(n)
    for i in range(n):
        work[i] = sign * y[i]
    maxval = work[0]
    for i in range(1, n):
        if work[i] > maxval:
            maxval = work[i]
    if maxval < inc:
        return 0.0
    nthresh = int(maxval / inc) + 1
    gapmean_nan = np.zeros(nthresh, dtype=np.int64)  # 1 where < 2 exceedances
    pct = np.empty(nthresh)
    mdrmd = np.empty(nthresh)
    idx = np.empty(n)
    for j in range(nthresh):
        thr = j * inc
        cnt = 0
        for i in range(n):
            if work[i] >= thr:
                idx[cnt] = i + 1.0  # 1-based positions, ascending
                cnt += 1
        if cnt < 2:
            gapmean_nan[j] = 1
        pct[j] = (cnt - 1) * 100.0 / n
        if cnt % 2 == 1:
            med = idx[cnt // 2]
        else:
            med = 0.5 * (idx[cnt // 2 - 1] + idx[cnt // 2])
        mdrmd[j] = med / (n / 2.0) - 1.0
    mj = 0
    fbi = nthresh - 1
    for i in range(nthresh):
        if pct[i] > 2.0:
            mj = i
        if gapmean_nan[nthresh - 1 - i] == 1:
            fbi = nthresh - 1 - i
    trim = mj if mj < fbi else fbi
    return np.median(mdrmd[: trim + 1])


@njit(cache=True)
def _f1ecac(acf):
    n = acf.shape[0]
    thresh = 1.0 / np.exp(1.0)
    for i in range(n - 1):
        if acf[i + 1] < thresh:
            m = acf[i + 1] - acf[i]
            if m == 0.0:
                return float(i + 1)
            return i + (thresh - acf[i]) / m
    return float(n)


@njit(cache=True)
def _first_min_acf(acf):
    n = acf.shape[0]
    for i in range(1, n - 1):
        if acf[i] < acf[i - 1] and acf[i] < acf[i + 1]:
            return float(i)
    return float(n)


@njit(cache=True)
def _first_zero_acf(acf, maxtau):
    n = acf.shape[0]
    limit = maxtau if maxtau < n else n
    for tau in range(1, limit):
        if acf[tau] <= 0.0:
            return tau
    return limit


@njit(cache=True)
def _fft_radix2(re, im):
    n = re.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            tr = re[i]
            re[i] = re[j]
            re[j] = tr
            ti = im[i]
            im[i] = im[j]
            im[j] = ti
    length = 2
    while length <= n:
        ang = -2.0 * np.pi / length
        wr = np.cos(ang)
        wi = np.sin(ang)
        half = length // 2
        for base in range(0, n, length):
            cwr = 1.0
            cwi = 0.0
            for k in range(half):
                ar = re[base + k]
                ai = im[base + k]
                br = re[base + k + half] * cwr - im[base + k + half] * cwi
                bi = re[base + k + half] * cwi + im[base + k + half] * cwr
                re[base + k] = ar + br
                im[base + k] = ai + bi
                re[base + k + half] = ar - br
                im[base + k + half] = ai - bi
                t = cwr * wr - cwi * wi
                cwi = cwr * wi + cwi * wr
                cwr = t
        length <<= 1


@njit(cache=True)
def _welch_area_centroid(y):
    n = y.shape[0]
    nfft = 256
    while nfft < n:
        nfft *= 2
    re = np.zeros(nfft)
    im = np.zeros(nfft)
    m = y.mean()
    for i in range(n):
        re[i] = y[i] - m
    _fft_radix2(re, im)
    nspec = nfft // 2 + 1
    s = np.empty(nspec)
    for j in range(nspec):
        p = (re[j] * re[j] + im[j] * im[j]) / n
        if 0 < j < nfft // 2:
            p *= 2.0
        s[j] = p / (2.0 * np.pi)
    dw = 2.0 * np.pi / nfft
    area = 0.0
    for j in range(nspec // 5):
        area += s[j] * dw
    total = 0.0
    for j in range(nspec):
        total += s[j]
    half_total = 0.5 * total
    centroid = 0.0
    cum = 0.0
    for j in range(nspec):
        cum += s[j]
        if cum > half_total:
            centroid = dw * j
            break
    return area, centroid


@njit(cache=True)
def _local_simple_mean_stderr(y, train):
    n = y.shape[0]
    nr = n - train
    res = np.empty(nr)
    for i in range(nr):
        m = 0.0
        for k in range(train):
            m += y[i + k]
        res[i] = y[i + train] - m / train
    mu = res.mean()
    s = 0.0
    for i in range(nr):
        s += (res[i] - mu) ** 2
    return np.sqrt(s / (nr - 1))


@njit(cache=True)
def _trev(y):
    n = y.shape[0]
    s = 0.0
    for i in range(n - 1):
        d = y[i + 1] - y[i]
        s += d * d * d
    return s / (n - 1)


@njit(cache=True)
def _find_bin(edges, v, nbins):
    for b in range(nbins):
        if edges[b] <= v < edges[b + 1]:
            return b
    return nbins - 1


@njit(cache=True)
def _histogram_ami_even_2_5(y):
    n = y.shape[0]
    tau = 2
    nbins = 5
    lo = y.min()
    hi = y.max()
    edges = np.empty(nbins + 1)
    for b in range(nbins + 1):
        edges[b] = lo + (hi - lo) * b / nbins
    edges[0] -= 0.1
    edges[nbins] += 0.1
    npair = n - tau
    joint = np.zeros((nbins, nbins))
    for t in range(npair):
        b1 = _find_bin(edges, y[t], nbins)
        b2 = _find_bin(edges, y[t + tau], nbins)
        joint[b1, b2] += 1.0
    ami = 0.0
    for i in range(nbins):
        for j in range(nbins):
            pij = joint[i, j] / npair
            if pij > 0.0:
                pi = 0.0
                pj = 0.0
                for k in range(nbins):
                    pi += joint[i, k]
                    pj += joint[k, j]
                pi /= npair
                pj /= npair
                ami += pij * np.log(pij / (pi * pj))
    return ami


@njit(cache=True)
def _auto_mi_gaussian_fmmi(y):
    n = y.shape[0]
    taumax = 40
    half = int(np.ceil(n / 2.0))
    if taumax > half:
        taumax = half
    ami = np.empty(taumax)
    for tau in range(1, taumax + 1):
        rho = _slice_corr(y, tau)
        r2 = rho * rho
        if r2 > 1.0 - 1e-15:
            r2 = 1.0 - 1e-15
        ami[tau - 1] = -0.5 * np.log(1.0 - r2)
    for j in range(1, taumax - 1):
        if ami[j] < ami[j - 1] and ami[j] < ami[j + 1]:
            return float(j + 1)
    return float(taumax)


@njit(cache=True)
def _pnn40(y):
    n = y.shape[0]
    cnt = 0
    for i in range(n - 1):
        if abs(y[i + 1] - y[i]) > 0.04:
            cnt += 1
    return cnt / (n - 1.0)


@njit(cache=True)
def _quantile_hazen(ysort, q):
    n = ysort.shape[0]
    pos = q * n - 0.5
    if pos <= 0.0:
        return ysort[0]
    if pos >= n - 1.0:
        return ysort[n - 1]
    left = int(np.floor(pos))
    frac = pos - left
    return ysort[left] + frac * (ysort[left + 1] - ysort[left])


@njit(cache=True)
def _coarsegrain3(y):
    n = y.shape[0]
    ysort = np.sort(y)
    th0 = ysort[0] - 1.0
    th1 = _quantile_hazen(ysort, 1.0 / 3.0)
    th2 = _quantile_hazen(ysort, 2.0 / 3.0)
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        v = y[i]
        if th0 < v <= th1:
            labels[i] = 0
        elif v <= th2:
            labels[i] = 1
        else:
            labels[i] = 2
    return labels


@njit(cache=True)
def _motif3_hh(y):
    labels = _coarsegrain3(y)
    n = labels.shape[0]
    joint = np.zeros((3, 3))
    for t in range(n - 1):
        joint[labels[t], labels[t + 1]] += 1.0
    total = n - 1.0
    hh = 0.0
    for i in range(3):
        for j in range(3):
            p = joint[i, j] / total
            if p > 0.0:
                hh -= p * np.log(p)
    return hh


@njit(cache=True)
def _local_simple_mean1_tauresrat(y, acf_y):
    n = y.shape[0]
    res = np.empty(n - 1)
    for i in range(n - 1):
        res[i] = y[i + 1] - y[i]
    acf_res = _acf_full(res)
    t_res = _first_zero_acf(acf_res, n - 1)
    t_y = _first_zero_acf(acf_y, n)
    return t_res / t_y


@njit(cache=True)
def _embed2_expfit_meandiff(y, tau):
    n = y.shape[0]
    if tau > n // 10:
        tau = n // 10
    if tau < 1:
        tau = 1
    nd = n - tau - 1
    if nd < 3:
        return 0.0
    d = np.empty(nd)
    for i in range(nd):
        dx = y[i + 1] - y[i]
        dy = y[i + tau + 1] - y[i + tau]
        d[i] = np.sqrt(dx * dx + dy * dy)
    lam = d.mean()
    sd = 0.0
    for i in range(nd):
        sd += (d[i] - lam) ** 2
    sd = np.sqrt(sd / (nd - 1))
    if sd < 0.001:
        return 0.0
    dmin = d.min()
    dmax = d.max()
    nbins = int(np.ceil((dmax - dmin) / (3.5 * sd / nd ** (1.0 / 3.0))))
    if nbins <= 0:
        return 0.0
    counts = np.zeros(nbins)
    bw = (dmax - dmin) / nbins
    for i in range(nd):
        b = int((d[i] - dmin) / bw)
        if b >= nbins:
            b = nbins - 1
        if b < 0:
            b = 0
        counts[b] += 1.0
    out = 0.0
    for b in range(nbins):
        center = dmin + bw * (b + 0.5)
        fitted = np.exp(-center / lam) / lam
        empirical = counts[b] / (nd * bw)
        out += abs(empirical - fitted)
    return out / nbins


@njit(cache=True)
def _linfit_resid_norm(x, y, lo, hi):
    n = hi - lo
    sx = 0.0
    sy = 0.0
    sxx = 0.0
    sxy = 0.0
    for i in range(lo, hi):
        sx += x[i]
        sy += y[i]
        sxx += x[i] * x[i]
        sxy += x[i] * y[i]
    denom = n * sxx - sx * sx
    slope = (n * sxy - sx * sy) / denom
    inter = (sy - slope * sx) / n
    s = 0.0
    for i in range(lo, hi):
        r = y[i] - (slope * x[i] + inter)
        s += r * r
    return np.sqrt(s)


@njit(cache=True)
def _fluct_anal_prop_r1(y, method):
    """Breakpoint location (as a proportion of scales) of a two-regime fit
    to log fluctuation vs log scale; method 0 = detrended fluctuation,
    1 = rescaled range of detrended windows."""
    n = y.shape[0]
    lin_low = np.log(5.0)
    lin_high = np.log(float(n // 2))
    taus = np.empty(50, dtype=np.int64)
    step = (lin_high - lin_low) / 49.0
    for i in range(50):
        x = np.exp(lin_low + step * i)
        taus[i] = int(np.floor(x + 0.5))
    uniq = np.empty(50, dtype=np.int64)
    ntau = 0
    prev = -1
    for i in range(50):
        if taus[i] != prev:
            uniq[ntau] = taus[i]
            ntau += 1
            prev = taus[i]
    if ntau < 12:
        return 0.0
    ycs = np.cumsum(y)
    logff = np.empty(ntau)
    logtt = np.empty(ntau)
    for ti in range(ntau):
        tau = uniq[ti]
        nbuf = n // tau
        f = 0.0
        for j in range(nbuf):
            sx = 0.0
            sy = 0.0
            sxx = 0.0
            sxy = 0.0
            for k in range(tau):
                v = ycs[j * tau + k]
                sx += k
                sy += v
                sxx += k * k
                sxy += k * v
            denom = tau * sxx - sx * sx
            slope = (tau * sxy - sx * sy) / denom
            inter = (sy - slope * sx) / tau
            if method == 0:
                for k in range(tau):
                    r = ycs[j * tau + k] - (slope * k + inter)
                    f += r * r
            else:
                rmin = 1e300
                rmax = -1e300
                for k in range(tau):
                    r = ycs[j * tau + k] - (slope * k + inter)
                    if r < rmin:
                        rmin = r
                    if r > rmax:
                        rmax = r
                f += (rmax - rmin) * (rmax - rmin)
        if method == 0:
            val = np.sqrt(f / (nbuf * tau))
        else:
            val = np.sqrt(f / nbuf)
        if val <= 0.0:
            return 0.0
        logff[ti] = np.log(val)
        logtt[ti] = np.log(float(tau))
    minpts = 6
    best = 1e300
    besti = minpts
    for ipts in range(minpts, ntau - minpts + 1):
        sse = _linfit_resid_norm(logtt, logff, 0, ipts)
        sse += _linfit_resid_norm(logtt, logff, ipts - 1, ntau)
        if sse < best:
            best = sse
            besti = ipts
    return besti / ntau


@njit(cache=True)
def _transition_matrix_sumdiagcov(y, tau):
    n = y.shape[0]
    if tau < 1:
        tau = 1
    ndown = 1 + (n - 1) // tau
    if ndown < 2:
        return 0.0
    ydown = np.empty(ndown)
    for i in range(ndown):
        ydown[i] = y[i * tau]
    if ydown.max() == ydown.min():
        return 0.0
    labels = _coarsegrain3(ydown)
    tmat = np.zeros((3, 3))
    for t in range(ndown - 1):
        tmat[labels[t], labels[t + 1]] += 1.0
    for i in range(3):
        for j in range(3):
            tmat[i, j] /= ndown - 1.0
    out = 0.0
    for j in range(3):
        m = (tmat[0, j] + tmat[1, j] + tmat[2, j]) / 3.0
        v = 0.0
        for i in range(3):
            v += (tmat[i, j] - m) ** 2
        out += v / 2.0
    return out


@njit(cache=True)
def _spline_detrend(y):
    """Residual of a least-squares C2 cubic with one interior knot at the
    midpoint of normalized time (truncated power basis)."""
    n = y.shape[0]
    b = np.empty((n, 5))
    for i in range(n):
        t = i / (n - 1.0)
        b[i, 0] = 1.0
        b[i, 1] = t
        b[i, 2] = t * t
        b[i, 3] = t * t * t
        u = t - 0.5
        b[i, 4] = u * u * u if u > 0.0 else 0.0
    g = b.T @ b
    rhs = b.T @ np.ascontiguousarray(y)
    coef = np.linalg.solve(g, rhs)
    return np.ascontiguousarray(y) - b @ coef


@njit(cache=True)
def _periodicity_wang(y):
    n = y.shape[0]
    ysub = _spline_detrend(y)
    acmax = int(np.ceil(n / 3.0))
    acf = np.empty(acmax)
    for tau in range(1, acmax + 1):
        acf[tau - 1] = _slice_corr(ysub, tau)
    for i in range(1, acmax - 1):
        if acf[i] > acf[i - 1] and acf[i] > acf[i + 1]:
            it = -1
            for j in range(i - 1, 0, -1):
                if acf[j] < acf[j - 1] and acf[j] < acf[j + 1]:
                    it = j
                    break
            if it < 0:
                continue
            if acf[i] - acf[it] >= 0.01 and acf[i] > 0.0:
                return float(i + 1)
    return 1.0


@njit(cache=True)
def catch22_kernel(y):
    """All 22 features of a z-scored non-constant window, canonical order."""
    n = y.shape[0]
    out = np.empty(22)
    acf = _acf_full(y)
    out[0] = _histogram_mode(y, 5)
    out[1] = _histogram_mode(y, 10)
    out[2] = _binarystats_diff_longstretch0(y)
    out[3] = _outlier_include_mdrmd(y, 1.0)
    out[4] = _outlier_include_mdrmd(y, -1.0)
    out[5] = _f1ecac(acf)
    out[6] = _first_min_acf(acf)
    area, centroid = _welch_area_centroid(y)
    out[7] = area
    out[8] = centroid
    out[9] = _local_simple_mean_stderr(y, 3)
    out[10] = _trev(y)
    out[11] = _histogram_ami_even_2_5(y)
    out[12] = _auto_mi_gaussian_fmmi(y)
    out[13] = _pnn40(y)
    out[14] = _binarystats_mean_longstretch1(y)
    out[15] = _motif3_hh(y)
    out[16] = _local_simple_mean1_tauresrat(y, acf)
    tau_fz = _first_zero_acf(acf, n)
    out[17] = _embed2_expfit_meandiff(y, tau_fz)
    out[18] = _fluct_anal_prop_r1(y, 0)
    out[19] = _fluct_anal_prop_r1(y, 1)
    out[20] = _transition_matrix_sumdiagcov(y, tau_fz)
    out[21] = _periodicity_wang(y)
    return out
