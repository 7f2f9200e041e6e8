"""The five cepstral feature families, dynamics, combination, normalization.

Families: MFCC, delta / delta-delta dynamics, BFCC, PLP and RASTA-PLP.
Frame-level matrices are averaged into fixed-length utterance vectors which
feed the classifiers; recipes describe which families are concatenated.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
import scipy.signal

from .audio_io import AudioBuffer
from .dsp import FrameConfig, analyze
from .errors import NoFrames, SingularAutocorrelation, TooFewVectors
from .filterbank import (BAND_FLOOR, WarpScale, apply_filterbank,
                         build_filterbank)

N_BANDS = 40          # triangular filters per bank
DELTA_WINDOW = 4      # +-4 frames: 9-point regression window
RASTA_WARMUP = 4      # leading frames dominated by the band-pass transient
DEFAULT_LPC_ORDER = 8  # 9 cepstral coefficients

# numerator / denominator of the RASTA band-pass trajectory filter
RASTA_B = 0.1 * np.array([2.0, 1.0, 0.0, -1.0, -2.0])
RASTA_A = np.array([1.0, -0.94])


@dataclass
class FeatureMatrix:
    """Frame-level features: values (frames x dim), family label, warm-up."""

    values: np.ndarray
    kind: str
    warmup: int = 0

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass
class FeatureRecipe:
    """Ordered feature blocks (family, dim) concatenated per utterance."""

    blocks: list
    delta_window: int = DELTA_WINDOW
    lpc_order: int = DEFAULT_LPC_ORDER

    # combination indices from the low-dim comparison study
    _TABLE = {
        1: ("mfcc",),
        2: ("delta", "delta_delta"),
        3: ("mfcc", "delta", "delta_delta"),
        4: ("bfcc",),
        5: ("rplp",),
        6: ("mfcc", "bfcc"),
        7: ("mfcc", "plp"),
        8: ("mfcc", "bfcc", "plp"),
        9: ("mfcc", "bfcc", "rplp"),
        10: ("mfcc", "bfcc", "plp", "rplp"),
        11: ("mfcc", "delta", "delta_delta", "bfcc"),
        12: ("mfcc", "delta", "delta_delta", "plp"),
        13: ("mfcc", "delta", "delta_delta", "bfcc", "plp", "rplp"),
    }

    @classmethod
    def from_index(cls, index: int, profile: str = "low") -> "FeatureRecipe":
        """Recipe for a combination index (1..13) at the low/high dim profile."""
        if index not in cls._TABLE:
            raise ValueError(f"recipe index must be 1..13, got {index}")
        if profile not in ("low", "high"):
            raise ValueError(f"profile must be 'low' or 'high', got {profile}")
        cep_dim = 10 if profile == "low" else 23
        blocks = [(kind, 9 if kind in ("plp", "rplp") else cep_dim)
                  for kind in cls._TABLE[index]]
        return cls(blocks=blocks)

    @property
    def dim(self) -> int:
        return sum(d for _, d in self.blocks)

    def describe(self) -> str:
        return "+".join(f"{kind}:{d}" for kind, d in self.blocks)


@dataclass
class UtteranceVector:
    """Fixed-length utterance descriptor plus the recipe that produced it."""

    values: np.ndarray
    recipe: FeatureRecipe


# --- cepstra on warped filterbanks --------------------------------------

def _bank_cepstra(buf, cfg, n_coeffs, scale, kind, include_c0):
    start = 0 if include_c0 else 1
    if not 1 <= n_coeffs <= N_BANDS - start:
        raise ValueError(f"n_coeffs must be in 1..{N_BANDS - start}, "
                         f"got {n_coeffs}")
    spec = analyze(buf, cfg, preemph=True)
    fb = build_filterbank(scale, N_BANDS, cfg.nfft, buf.sample_rate)
    energies = np.maximum(apply_filterbank(fb, spec), BAND_FLOOR)
    cep = scipy.fft.dct(np.log(energies), type=2, norm="ortho", axis=1)
    return FeatureMatrix(values=cep[:, start:start + n_coeffs], kind=kind)


def mfcc(buf: AudioBuffer, cfg: FrameConfig, n_coeffs: int = 10,
         include_c0: bool = True) -> FeatureMatrix:
    """Mel-warped cepstra: pre-emphasis, 40-filter Mel bank, log, DCT-II.

    c0 counts toward n_coeffs by default; include_c0=False starts at c1.
    """
    return _bank_cepstra(buf, cfg, n_coeffs, WarpScale.MEL, "MFCC", include_c0)


def bfcc(buf: AudioBuffer, cfg: FrameConfig, n_coeffs: int = 10,
         include_c0: bool = True) -> FeatureMatrix:
    """Bark-warped cepstra; identical pipeline to mfcc apart from the warp."""
    return _bank_cepstra(buf, cfg, n_coeffs, WarpScale.BARK, "BFCC", include_c0)


def deltas(feat: FeatureMatrix, w: int = DELTA_WINDOW) -> FeatureMatrix:
    """Regression dynamics over a +-w frame window, edges replicated.

    D_t = sum_i i*(C_{t+i} - C_{t-i}) / (2 * sum_i i^2), i = 1..w.
    """
    if w < 1:
        raise ValueError(f"delta window must be >= 1, got {w}")
    c = feat.values
    t = c.shape[0]
    padded = np.concatenate([np.repeat(c[:1], w, axis=0), c,
                             np.repeat(c[-1:], w, axis=0)])
    num = np.zeros_like(c)
    for i in range(1, w + 1):
        num += i * (padded[w + i:w + i + t] - padded[w - i:w - i + t])
    denom = 2.0 * sum(i * i for i in range(1, w + 1))
    label = "DeltaDelta" if feat.kind == "Delta" else "Delta"
    return FeatureMatrix(values=num / denom, kind=label, warmup=feat.warmup)


# --- linear prediction --------------------------------------------------

def levinson(r: np.ndarray, order: int):
    """Levinson-Durbin over rows of autocorrelations.

    r is (frames, >= order+1). Returns monic predictor rows a
    (frames, order+1, a[:,0] = 1) and the prediction error power e.
    """
    r = np.atleast_2d(r)
    a = np.zeros((r.shape[0], order + 1))
    a[:, 0] = 1.0
    e = r[:, 0].copy()
    if np.any(e <= 0.0):
        raise SingularAutocorrelation("zero-lag autocorrelation <= 0")
    for i in range(1, order + 1):
        acc = r[:, i] + np.sum(a[:, 1:i] * r[:, i - 1:0:-1], axis=1)
        k = -acc / e
        a[:, 1:i] = a[:, 1:i] + k[:, None] * a[:, i - 1:0:-1]
        a[:, i] = k
        e = e * (1.0 - k * k)
        if np.any(e <= 0.0):
            raise SingularAutocorrelation(f"prediction error <= 0 at order {i}")
    return a, e


def lpc_to_cepstrum(a: np.ndarray, e: np.ndarray, n_ceps: int) -> np.ndarray:
    """Cepstra of the all-pole model spectrum e/|A|^2, c0 = ln(e)."""
    a = np.atleast_2d(a)
    order = a.shape[1] - 1
    cep = np.zeros((a.shape[0], n_ceps))
    cep[:, 0] = np.log(e)
    for n in range(1, n_ceps):
        an = a[:, n] if n <= order else 0.0
        acc = np.zeros(a.shape[0])
        for m in range(1, n):
            if n - m <= order:
                acc += m * cep[:, m] * a[:, n - m]
        cep[:, n] = -an - acc / n
    return cep


def equal_loudness(freqs_hz: np.ndarray) -> np.ndarray:
    """Equal-loudness weighting evaluated at band center frequencies."""
    w2 = (2.0 * np.pi * np.asarray(freqs_hz, dtype=float)) ** 2
    return ((w2 + 56.8e6) * w2 ** 2) / ((w2 + 6.3e6) ** 2 * (w2 + 0.38e9))


def rasta_filter(band_trajectories: np.ndarray, init: str = "zero") -> np.ndarray:
    """Band-pass each band trajectory with 0.1*[2,1,0,-1,-2] / [1,-0.94].

    init="zero" starts from rest; init="steady" seeds the filter state as if
    the first frame had been present forever, so a constant offset common to
    all frames is rejected exactly instead of decaying through the pole.
    The first RASTA_WARMUP output frames are transient either way.
    """
    x = np.atleast_2d(band_trajectories)
    if init == "zero":
        return scipy.signal.lfilter(RASTA_B, RASTA_A, x, axis=0)
    if init == "steady":
        zi = scipy.signal.lfilter_zi(RASTA_B, RASTA_A)
        y, _ = scipy.signal.lfilter(RASTA_B, RASTA_A, x, axis=0,
                                    zi=np.outer(zi, x[0]))
        return y
    raise ValueError(f"init must be 'zero' or 'steady', got {init!r}")


def _auditory_cepstra(buf, cfg, model_order, rasta, kind):
    spec = analyze(buf, cfg, preemph=False)
    fb = build_filterbank(WarpScale.BARK, N_BANDS, cfg.nfft, buf.sample_rate)
    energies = np.maximum(apply_filterbank(fb, spec), BAND_FLOOR)
    warmup = 0
    if rasta:
        energies = np.exp(rasta_filter(np.log(energies), init="steady"))
        warmup = RASTA_WARMUP
    compressed = (energies * equal_loudness(fb.center_freqs)[None, :]) ** 0.33
    autocorr = np.fft.irfft(compressed, n=2 * (N_BANDS - 1), axis=1)
    a, e = levinson(autocorr[:, :model_order + 1], model_order)
    cep = lpc_to_cepstrum(a, e, model_order + 1)
    return FeatureMatrix(values=cep, kind=kind, warmup=warmup)


def plp(buf: AudioBuffer, cfg: FrameConfig,
        model_order: int = DEFAULT_LPC_ORDER) -> FeatureMatrix:
    """Perceptual linear prediction cepstra.

    Bark-band integration, equal-loudness weighting and cube-root
    compression, then an order-`model_order` all-pole fit converted to
    model_order + 1 cepstral coefficients.
    """
    if model_order < 1:
        raise ValueError(f"model_order must be >= 1, got {model_order}")
    return _auditory_cepstra(buf, cfg, model_order, rasta=False, kind="PLP")


def rasta_plp(buf: AudioBuffer, cfg: FrameConfig,
              model_order: int = DEFAULT_LPC_ORDER) -> FeatureMatrix:
    """PLP with RASTA band-pass filtering of the log band energies."""
    if model_order < 1:
        raise ValueError(f"model_order must be >= 1, got {model_order}")
    return _auditory_cepstra(buf, cfg, model_order, rasta=True, kind="RPLP")


# --- utterance aggregation and combination ------------------------------

def aggregate_utterance(feat: FeatureMatrix) -> np.ndarray:
    """Per-dimension mean over usable (post warm-up) frames."""
    usable = feat.values[feat.warmup:]
    if usable.shape[0] < 1:
        raise NoFrames(f"no usable frames past {feat.warmup} warm-up frames")
    return usable.mean(axis=0)


def combine(recipe: FeatureRecipe, buf: AudioBuffer,
            cfg: FrameConfig) -> UtteranceVector:
    """Extract, aggregate and concatenate the recipe's feature blocks."""
    cep_cache = {}  # (family, dim) -> FeatureMatrix, mfcc shared with deltas

    def cepstral(family, dim):
        key = (family, dim)
        if key not in cep_cache:
            fn = mfcc if family == "mfcc" else bfcc
            cep_cache[key] = fn(buf, cfg, n_coeffs=dim)
        return cep_cache[key]

    parts = []
    for kind, dim in recipe.blocks:
        if kind == "mfcc":
            fm = cepstral("mfcc", dim)
        elif kind == "bfcc":
            fm = cepstral("bfcc", dim)
        elif kind == "delta":
            fm = deltas(cepstral("mfcc", dim), recipe.delta_window)
        elif kind == "delta_delta":
            fm = deltas(deltas(cepstral("mfcc", dim), recipe.delta_window),
                        recipe.delta_window)
        elif kind == "plp":
            fm = plp(buf, cfg, model_order=dim - 1)
        elif kind == "rplp":
            fm = rasta_plp(buf, cfg, model_order=dim - 1)
        else:
            raise ValueError(f"unknown feature block {kind!r}")
        parts.append(aggregate_utterance(fm))
    return UtteranceVector(values=np.concatenate(parts), recipe=recipe)


# --- normalization ------------------------------------------------------

STD_FLOOR = 1e-8


@dataclass
class Normalizer:
    """Per-dimension z-scoring fitted on training vectors only.

    Dimensions whose training std falls below STD_FLOOR carry no
    information and are zeroed by the transform.
    """

    mean: np.ndarray
    std: np.ndarray
    active: np.ndarray = field(repr=False)
    provenance: str = "train"


def fit_normalizer(train_vectors: np.ndarray) -> Normalizer:
    x = np.asarray(train_vectors, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise TooFewVectors("need at least 2 training vectors")
    std = x.std(axis=0)
    active = std >= STD_FLOOR
    return Normalizer(mean=x.mean(axis=0), std=np.maximum(std, STD_FLOOR),
                      active=active)


def apply_normalizer(norm: Normalizer, vectors: np.ndarray) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    return (v - norm.mean) / norm.std * norm.active


def invert_normalizer(norm: Normalizer, vectors: np.ndarray) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    return np.where(norm.active, v * norm.std + norm.mean, norm.mean)


# --- CSV export ---------------------------------------------------------

def feature_matrix_to_csv(feat: FeatureMatrix, path) -> None:
    """One row per frame under a `kind:dim` header."""
    with open(path, "w") as fh:
        fh.write(f"{feat.kind}:{feat.dim}\n")
        for row in feat.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def utterance_vector_to_csv(vec: UtteranceVector, path) -> None:
    """Single row under the recipe's block header."""
    with open(path, "w") as fh:
        fh.write(vec.recipe.describe() + "\n")
        fh.write(",".join(repr(float(v)) for v in vec.values) + "\n")
