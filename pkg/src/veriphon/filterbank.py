"""Mel/Bark frequency warps and triangular filterbank construction."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dsp import Spectrogram
from .errors import BadRange, NegativeFrequency, ShapeMismatch

# energies are clamped here before any log (silent frames stay finite)
BAND_FLOOR = 1e-10


class WarpScale(Enum):
    MEL = "mel"
    BARK = "bark"


def hz_to_mel(f):
    """Mel = 2595 * log10(1 + f/700)."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise NegativeFrequency(f"negative frequency in {f}")
    return 2595.0 * np.log10(1.0 + f / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


def hz_to_bark(f):
    """Bark = 6 * asinh(f/600)."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise NegativeFrequency(f"negative frequency in {f}")
    return 6.0 * np.arcsinh(f / 600.0)


def bark_to_hz(b):
    return 600.0 * np.sinh(np.asarray(b, dtype=float) / 6.0)


_WARP = {
    WarpScale.MEL: (hz_to_mel, mel_to_hz),
    WarpScale.BARK: (hz_to_bark, bark_to_hz),
}


@dataclass(frozen=True)
class TriangularFilterbank:
    """Unit-peak triangles on warp-equispaced centers, sampled at DFT bins."""

    weights: np.ndarray      # n_filters x n_bins
    center_freqs: np.ndarray  # Hz, one per filter
    n_filters: int


def build_filterbank(scale: WarpScale, n_filters: int, nfft: int,
                     sample_rate: int, f_lo: float = 0.0,
                     f_hi: float | None = None) -> TriangularFilterbank:
    """Build a triangular filterbank with warp-equispaced edge frequencies.

    n_filters + 2 edges are placed uniformly between warp(f_lo) and
    warp(f_hi); filter m rises linearly (in Hz) from edge m-1 to a unit
    peak at edge m and falls to zero at edge m+1.
    """
    nyquist = sample_rate / 2.0
    if f_hi is None:
        f_hi = nyquist
    if not (0.0 <= f_lo < f_hi <= nyquist):
        raise BadRange(f"need 0 <= f_lo < f_hi <= {nyquist}, "
                       f"got [{f_lo}, {f_hi}]")
    if n_filters < 1:
        raise BadRange(f"n_filters must be >= 1, got {n_filters}")

    fwd, inv = _WARP[scale]
    edges = inv(np.linspace(fwd(f_lo), fwd(f_hi), n_filters + 2))
    bins = np.arange(nfft // 2 + 1) * sample_rate / nfft

    lo = edges[:-2, None]
    mid = edges[1:-1, None]
    hi = edges[2:, None]
    rising = (bins[None, :] - lo) / (mid - lo)
    falling = (hi - bins[None, :]) / (hi - mid)
    weights = np.clip(np.minimum(rising, falling), 0.0, None)

    return TriangularFilterbank(weights=weights, center_freqs=edges[1:-1],
                                n_filters=n_filters)


def apply_filterbank(fb: TriangularFilterbank, spec: Spectrogram) -> np.ndarray:
    """Band energies: per-frame weighted sums of power bins (frames x filters)."""
    if fb.weights.shape[1] != spec.power.shape[1]:
        raise ShapeMismatch(f"filterbank has {fb.weights.shape[1]} bins, "
                            f"spectrogram has {spec.power.shape[1]}")
    return spec.power @ fb.weights.T
