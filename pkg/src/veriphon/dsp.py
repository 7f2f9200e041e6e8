"""Short-time analysis front end: pre-emphasis, framing, windowing, spectra."""

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import BadNfft, EmptyBuffer, TooShort


@dataclass(frozen=True)
class FrameConfig:
    """Frame length / hop in ms, pre-emphasis coefficient and FFT size."""

    frame_len_ms: float = 25.0
    hop_ms: float = 10.0
    preemph: float = 0.97
    nfft: int = 512

    def __post_init__(self):
        if not 0.0 < self.hop_ms <= self.frame_len_ms:
            raise ValueError("need 0 < hop_ms <= frame_len_ms")
        if not 0.0 <= self.preemph < 1.0:
            raise ValueError("preemph must be in [0, 1)")

    def frame_samples(self, sample_rate: int) -> int:
        return int(round(self.frame_len_ms * sample_rate / 1000.0))

    def hop_samples(self, sample_rate: int) -> int:
        return int(round(self.hop_ms * sample_rate / 1000.0))


@dataclass(frozen=True)
class Spectrogram:
    """One-sided power spectrum per frame: frames x (nfft/2 + 1)."""

    power: np.ndarray
    frame_rate: float
    nfft: int


def hann_periodic(n: int) -> np.ndarray:
    """Periodic Hann window w[k] = 0.5 - 0.5*cos(2*pi*k/n)."""
    k = np.arange(n)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / n)


def pre_emphasize(buf: AudioBuffer, alpha: float) -> AudioBuffer:
    """First-order high-pass: y[0] = x[0], y[n] = x[n] - alpha*x[n-1]."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    if len(buf) == 0:
        raise EmptyBuffer("pre-emphasis of an empty buffer")
    x = buf.samples
    y = np.concatenate(([x[0]], x[1:] - alpha * x[:-1]))
    return AudioBuffer(samples=y, sample_rate=buf.sample_rate)


def frame_and_window(buf: AudioBuffer, cfg: FrameConfig) -> np.ndarray:
    """Slice into overlapping frames and apply a periodic Hann window.

    Returns a (n_frames, frame_samples) matrix with
    n_frames = 1 + floor((len - frame_samples) / hop_samples).
    """
    n = cfg.frame_samples(buf.sample_rate)
    hop = cfg.hop_samples(buf.sample_rate)
    x = buf.samples
    if len(x) < n:
        raise TooShort(f"{len(x)} samples < one {n}-sample frame")
    n_frames = 1 + (len(x) - n) // hop
    idx = np.arange(n)[None, :] + hop * np.arange(n_frames)[:, None]
    return x[idx] * hann_periodic(n)[None, :]


def power_spectrum(frames: np.ndarray, nfft: int) -> Spectrogram:
    """Zero-pad each frame to nfft and take |DFT|^2 over bins 0..nfft/2."""
    if nfft < 1 or (nfft & (nfft - 1)) != 0:
        raise BadNfft(f"nfft must be a power of two, got {nfft}")
    if nfft < frames.shape[1]:
        raise BadNfft(f"nfft {nfft} < frame length {frames.shape[1]}")
    spec = np.fft.rfft(frames, n=nfft, axis=1)
    return Spectrogram(power=np.abs(spec) ** 2, frame_rate=0.0, nfft=nfft)


def analyze(buf: AudioBuffer, cfg: FrameConfig, preemph: bool = True) -> Spectrogram:
    """Full front end: optional pre-emphasis, framing, window, power spectrum."""
    if preemph and cfg.preemph > 0.0:
        buf = pre_emphasize(buf, cfg.preemph)
    frames = frame_and_window(buf, cfg)
    spec = power_spectrum(frames, cfg.nfft)
    frame_rate = buf.sample_rate / cfg.hop_samples(buf.sample_rate)
    return Spectrogram(power=spec.power, frame_rate=frame_rate, nfft=cfg.nfft)
