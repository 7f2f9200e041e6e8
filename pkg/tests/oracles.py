"""Naive reference implementations the tests compare against.

Everything here is written straight from the formulas with explicit loops
and direct transforms (no FFT, no scipy, no package imports). Slow on
purpose; meant for small inputs and frozen expectations.
"""

import math
from fractions import Fraction

import numpy as np

SR = 16000
FRAME = 400
HOP = 160
NFFT = 512
N_BANDS = 40
BAND_FLOOR = 1e-10
PREEMPH = 0.97


# --- front end ----------------------------------------------------------

def preemphasis(x, alpha=PREEMPH):
    y = [x[0]]
    for n in range(1, len(x)):
        y.append(x[n] - alpha * x[n - 1])
    return np.array(y)


def hann(n):
    return np.array([0.5 - 0.5 * math.cos(2.0 * math.pi * k / n)
                     for k in range(n)])


def frames_windowed(x, frame=FRAME, hop=HOP):
    w = hann(frame)
    n_frames = 1 + (len(x) - frame) // hop
    return np.array([x[t * hop:t * hop + frame] * w for t in range(n_frames)])


_DFT_CACHE = {}


def dft_bases(nfft):
    """cos/sin matrices of the one-sided DFT, straight from the definition."""
    if nfft not in _DFT_CACHE:
        k = np.arange(nfft // 2 + 1, dtype=float)
        t = np.arange(nfft, dtype=float)
        ang = 2.0 * math.pi * np.outer(k, t) / nfft
        _DFT_CACHE[nfft] = (np.cos(ang), np.sin(ang))
    return _DFT_CACHE[nfft]


def power_spectrum(frames, nfft=NFFT):
    """|X_k|^2 = (sum x cos)^2 + (sum x sin)^2 with zero padding."""
    cos_m, sin_m = dft_bases(nfft)
    padded = np.zeros((frames.shape[0], nfft))
    padded[:, :frames.shape[1]] = frames
    re = padded @ cos_m.T
    im = padded @ sin_m.T
    return re ** 2 + im ** 2


def dft_power_scalar(frame, nfft):
    """Fully scalar O(N^2) DFT power for tiny frames."""
    out = []
    for k in range(nfft // 2 + 1):
        re = im = 0.0
        for t, v in enumerate(frame):
            re += v * math.cos(2.0 * math.pi * k * t / nfft)
            im += v * math.sin(2.0 * math.pi * k * t / nfft)
        out.append(re * re + im * im)
    return np.array(out)


# --- warps and filterbank -----------------------------------------------

def mel(f):
    return 2595.0 * math.log10(1.0 + f / 700.0)


def mel_inv(m):
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def bark(f):
    return 6.0 * math.log(f / 600.0 + math.sqrt((f / 600.0) ** 2 + 1.0))


def bark_inv(b):
    return 600.0 * math.sinh(b / 6.0)


def triangle_weights(fwd, inv, n_filters=N_BANDS, nfft=NFFT, sr=SR,
                     f_lo=0.0, f_hi=None):
    """Unit-peak triangles on warp-equispaced edges, one bin at a time."""
    if f_hi is None:
        f_hi = sr / 2.0
    wlo, whi = fwd(f_lo), fwd(f_hi)
    edges = [inv(wlo + (whi - wlo) * i / (n_filters + 1))
             for i in range(n_filters + 2)]
    n_bins = nfft // 2 + 1
    weights = np.zeros((n_filters, n_bins))
    centers = []
    for m in range(n_filters):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        centers.append(mid)
        for b in range(n_bins):
            f = b * sr / nfft
            if lo < f <= mid:
                weights[m, b] = (f - lo) / (mid - lo)
            elif mid < f < hi:
                weights[m, b] = (hi - f) / (hi - mid)
    return weights, np.array(centers)


def band_energies_loop(power, weights):
    """Double-loop Eq.-style band summation; small inputs only."""
    n_frames, n_bins = power.shape
    out = np.zeros((n_frames, weights.shape[0]))
    for t in range(n_frames):
        for m in range(weights.shape[0]):
            acc = 0.0
            for b in range(n_bins):
                acc += power[t, b] * weights[m, b]
            out[t, m] = acc
    return out


def dct2_ortho_matrix(n):
    mat = np.zeros((n, n))
    for k in range(n):
        s = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        for t in range(n):
            mat[k, t] = s * math.cos(math.pi * k * (2 * t + 1) / (2 * n))
    return mat


def bank_cepstra(x, warp, n_coeffs=10, sr=SR):
    """MFCC/BFCC pipeline from the raw samples; warp is 'mel' or 'bark'."""
    fwd, inv = (mel, mel_inv) if warp == "mel" else (bark, bark_inv)
    frames = frames_windowed(preemphasis(x))
    power = power_spectrum(frames)
    weights, _ = triangle_weights(fwd, inv, sr=sr)
    energies = np.maximum(power @ weights.T, BAND_FLOOR)
    dct = dct2_ortho_matrix(N_BANDS)
    cep = np.log(energies) @ dct.T
    return cep[:, :n_coeffs]


# --- dynamics -----------------------------------------------------------

def deltas(c, w=4):
    t_max, dim = c.shape
    out = np.zeros_like(c)
    denom = 2.0 * sum(i * i for i in range(1, w + 1))
    for t in range(t_max):
        for d in range(dim):
            acc = 0.0
            for i in range(1, w + 1):
                fwd = c[min(t + i, t_max - 1), d]
                bwd = c[max(t - i, 0), d]
                acc += i * (fwd - bwd)
            out[t, d] = acc / denom
    return out


# --- linear prediction --------------------------------------------------

def levinson_scalar(r, order):
    a = [1.0] + [0.0] * order
    e = r[0]
    if e <= 0.0:
        raise ZeroDivisionError("r[0] <= 0")
    for i in range(1, order + 1):
        acc = r[i]
        for k in range(1, i):
            acc += a[k] * r[i - k]
        k_i = -acc / e
        new = a[:]
        for j in range(1, i):
            new[j] = a[j] + k_i * a[i - j]
        new[i] = k_i
        a = new
        e *= 1.0 - k_i * k_i
        if e <= 0.0:
            raise ZeroDivisionError(f"error power <= 0 at order {i}")
    return a, e


def lpc_cepstrum_scalar(a, e, n_ceps):
    """c_n = -a_n - (1/n) sum m*c_m*a_{n-m}; c_0 = ln e."""
    order = len(a) - 1
    c = [math.log(e)] + [0.0] * (n_ceps - 1)
    for n in range(1, n_ceps):
        an = a[n] if n <= order else 0.0
        acc = 0.0
        for m in range(1, n):
            if n - m <= order:
                acc += m * c[m] * a[n - m]
        c[n] = -an - acc / n
    return np.array(c)


def equal_loudness_scalar(f):
    w2 = (2.0 * math.pi * f) ** 2
    return ((w2 + 56.8e6) * w2 ** 2) / ((w2 + 6.3e6) ** 2 * (w2 + 0.38e9))


def irfft_cosine(rows, n_out):
    """Inverse one-sided DFT as an explicit cosine sum (real even input)."""
    rows = np.atleast_2d(rows)
    n_bins = rows.shape[1]
    mat = np.zeros((n_out, n_bins))
    for m in range(n_out):
        for k in range(n_bins):
            # DC and Nyquist terms appear once; interior bins twice
            scale = 1.0 if k == 0 or 2 * k == n_out else 2.0
            mat[m, k] = scale * math.cos(2.0 * math.pi * k * m / n_out) / n_out
    return rows @ mat.T


def rasta_scalar(x, init="zero", warm_frames=600):
    """Difference equation y[t] = sum b_j x[t-j] + 0.94 y[t-1] per band."""
    b = [0.2, 0.1, 0.0, -0.1, -0.2]
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if init == "steady":
        x = np.concatenate([np.repeat(x[:1], warm_frames, axis=0), x])
    t_max, bands = x.shape
    y = np.zeros_like(x)
    for d in range(bands):
        for t in range(t_max):
            acc = 0.94 * (y[t - 1, d] if t > 0 else 0.0)
            for j in range(len(b)):
                if t - j >= 0:
                    acc += b[j] * x[t - j, d]
            y[t, d] = acc
    return y[warm_frames:] if init == "steady" else y


def plp_cepstra(x, order=8, rasta=False, sr=SR):
    """PLP / RASTA-PLP pipeline from raw samples, no pre-emphasis."""
    frames = frames_windowed(np.asarray(x, dtype=float))
    power = power_spectrum(frames)
    weights, centers = triangle_weights(bark, bark_inv, sr=sr)
    energies = np.maximum(power @ weights.T, BAND_FLOOR)
    if rasta:
        energies = np.exp(rasta_scalar(np.log(energies), init="steady"))
    eql = np.array([equal_loudness_scalar(f) for f in centers])
    compressed = (energies * eql[None, :]) ** 0.33
    autocorr = irfft_cosine(compressed, 2 * (N_BANDS - 1))
    cep = np.zeros((frames.shape[0], order + 1))
    for t in range(frames.shape[0]):
        a, e = levinson_scalar(list(autocorr[t, :order + 1]), order)
        cep[t] = lpc_cepstrum_scalar(a, e, order + 1)
    return cep


# --- metrics ------------------------------------------------------------

def auc_pairwise(scores, labels):
    """Wilcoxon statistic as exact integers: (2*greater + equal, 2*P*N)."""
    pos = [s for s, y in zip(scores, labels) if y > 0]
    neg = [s for s, y in zip(scores, labels) if y < 0]
    greater = equal = 0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                greater += 1
            elif sp == sn:
                equal += 1
    return 2 * greater + equal, 2 * len(pos) * len(neg)


def auc_fraction(scores, labels):
    numer, denom = auc_pairwise(scores, labels)
    return Fraction(numer, denom)


def vote_truth(decisions, rule, k=None):
    """Brute-force voting semantics for the four rules."""
    n = len(decisions)
    if rule == "or":
        return int(any(decisions))
    if rule == "and":
        return int(all(decisions))
    if rule == "majority":
        return int(sum(decisions) >= math.ceil((n + 1) / 2))
    if rule == "kofn":
        return int(sum(decisions) >= k)
    raise ValueError(rule)


# --- logistic regression ------------------------------------------------

def lr_penalized_ll(X, y01, beta, l2):
    """Sum log p(y|x) - (l2/2)*||beta[1:]||^2, intercept unpenalized."""
    ll = 0.0
    for i in range(len(y01)):
        z = beta[0]
        for d in range(X.shape[1]):
            z += beta[1 + d] * X[i, d]
        # log sigmoid without overflow
        if z >= 0:
            log_p = -math.log1p(math.exp(-z))
            log_q = -z - math.log1p(math.exp(-z))
        else:
            log_p = z - math.log1p(math.exp(z))
            log_q = -math.log1p(math.exp(z))
        ll += log_p if y01[i] == 1 else log_q
    pen = 0.5 * l2 * sum(b * b for b in beta[1:])
    return ll - pen


def fd_gradient(fun, beta, h=1e-6):
    g = np.zeros(len(beta))
    for j in range(len(beta)):
        up = np.array(beta, dtype=float)
        dn = np.array(beta, dtype=float)
        up[j] += h
        dn[j] -= h
        g[j] = (fun(up) - fun(dn)) / (2.0 * h)
    return g


def lr_grid_best_ll(X, y01, l2, span=10.0, steps=21, zooms=8):
    """Coarse-to-fine grid over (intercept, slope...) maximizing the LL."""
    dim = X.shape[1] + 1
    center = np.zeros(dim)
    width = span
    best = None
    for _ in range(zooms):
        axes = [np.linspace(center[d] - width, center[d] + width, steps)
                for d in range(dim)]
        grids = np.meshgrid(*axes, indexing="ij")
        flat = np.stack([g.ravel() for g in grids], axis=1)
        vals = [lr_penalized_ll(X, y01, b, l2) for b in flat]
        top = int(np.argmax(vals))
        center = flat[top]
        best = vals[top]
        width = 2.0 * width / (steps - 1)
    return best, center


# --- enhancement --------------------------------------------------------

def overlap_add(frames, hop, window):
    """Plain WOLA loop; returns (samples, accumulated window energy)."""
    n_frames, frame_len = frames.shape
    span = (n_frames - 1) * hop + frame_len
    acc = np.zeros(span)
    den = np.zeros(span)
    for t in range(n_frames):
        for j in range(frame_len):
            acc[t * hop + j] += frames[t, j] * window[j]
            den[t * hop + j] += window[j] * window[j]
    out = np.zeros(span)
    nz = den > 1e-10
    out[nz] = acc[nz] / den[nz]
    return out, den


def subtract_bands(power, noise, edges, deltas_w, beta, smooth):
    """Frame/band loops mirroring the documented subtraction rule."""
    n_frames = power.shape[0]
    sub = np.zeros_like(power)
    for t in range(n_frames):
        for i, (lo, hi) in enumerate(edges):
            y_sum = float(power[t, lo:hi].sum())
            d_sum = float(noise[lo:hi].sum())
            if d_sum <= 0.0:
                alpha = 1.0
            else:
                snr = 10.0 * math.log10(y_sum / d_sum) if y_sum > 0 \
                    else -math.inf
                alpha = min(max(4.0 - 0.15 * snr, 1.0), 4.75)
            for b in range(lo, hi):
                sub[t, b] = power[t, b] - alpha * deltas_w[i] * noise[b]
    if smooth and n_frames > 1:
        mixed = np.zeros_like(sub)
        for t in range(n_frames):
            prev = sub[max(t - 1, 0)]
            nxt = sub[min(t + 1, n_frames - 1)]
            mixed[t] = 0.05 * prev + 0.9 * sub[t] + 0.05 * nxt
        sub = mixed
    return np.minimum(np.maximum(sub, beta * power), power)


def snr_db(clean, test):
    """SNR of test against the clean reference, in dB."""
    err = test - clean
    return 10.0 * math.log10(float(np.sum(clean ** 2))
                             / float(np.sum(err ** 2)))
