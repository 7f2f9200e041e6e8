"""PCM audio loading, energy measurement and SNR-exact noise mixing."""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBuffer, FormatError, RateMismatch, SilentInput

# fmt-chunk codec tags we accept
_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioBuffer:
    """Mono signal: float64 samples (nominal [-1, 1]) plus rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __len__(self):
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class SnrSpec:
    """Target signal-to-noise ratio in dB for contaminated test material."""

    snr_db: float

    def __post_init__(self):
        if not np.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")


def load_wav(path) -> AudioBuffer:
    """Read a RIFF/WAVE file into a mono AudioBuffer.

    Integer PCM (8/16/24/32-bit) is scaled to [-1, 1] by the full scale of
    its bit depth; 32-bit float is taken as-is. Multichannel input is
    averaged down to mono. Raises FormatError for anything that is not a
    well-formed PCM/float WAV; unreadable files raise OSError.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if size < 16 or len(body) < 16:
                raise FormatError(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if len(body) < size:
                raise FormatError(f"{path}: truncated data chunk")
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise FormatError(f"{path}: missing fmt or data chunk")

    codec, n_channels, sample_rate, _, _, bits = fmt
    if codec == _WAVE_FORMAT_EXTENSIBLE:
        # sub-format GUID starts with the ordinary codec tag
        raise FormatError(f"{path}: WAVE_FORMAT_EXTENSIBLE not supported")
    if n_channels < 1 or sample_rate <= 0:
        raise FormatError(f"{path}: bad channel count or sample rate")

    if codec == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise FormatError(f"{path}: only 32-bit float supported")
        x = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    elif codec == _WAVE_FORMAT_PCM:
        if bits == 8:
            x = (np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
                 - 128.0) / 128.0
        elif bits == 16:
            x = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
        elif bits == 24:
            raw = np.frombuffer(payload, dtype=np.uint8)
            raw = raw[: 3 * (len(raw) // 3)].reshape(-1, 3)
            as32 = (raw[:, 0].astype(np.uint32)
                    | (raw[:, 1].astype(np.uint32) << 8)
                    | (raw[:, 2].astype(np.uint32) << 16))
            signed = as32.astype(np.int32)
            signed[signed >= 1 << 23] -= 1 << 24
            x = signed.astype(np.float64) / float(1 << 23)
        elif bits == 32:
            x = np.frombuffer(payload, dtype="<i4").astype(np.float64) / float(1 << 31)
        else:
            raise FormatError(f"{path}: unsupported PCM depth {bits}")
    else:
        raise FormatError(f"{path}: unsupported codec 0x{codec:04x}")

    frames = len(x) // n_channels
    x = x[: frames * n_channels]
    if n_channels > 1:
        x = x.reshape(frames, n_channels).mean(axis=1)
    return AudioBuffer(samples=x, sample_rate=int(sample_rate))


def save_wav(path, buf: AudioBuffer) -> None:
    """Write a mono 16-bit PCM WAV, clipping samples outside [-1, 1]."""
    q = np.clip(np.round(buf.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = q.tobytes()
    sr = buf.sample_rate
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE")
        fh.write(b"fmt " + struct.pack("<IHHIIHH", 16, _WAVE_FORMAT_PCM, 1,
                                       sr, sr * 2, 2, 16))
        fh.write(b"data" + struct.pack("<I", len(payload)) + payload)


def rms(buf: AudioBuffer) -> float:
    """Root-mean-square amplitude of the buffer."""
    if len(buf) == 0:
        raise EmptyBuffer("rms of an empty buffer")
    return float(np.sqrt(np.mean(buf.samples ** 2)))


def mix_noise_at_snr(speech: AudioBuffer, noise: AudioBuffer,
                     spec: SnrSpec, seed: int) -> AudioBuffer:
    """Add noise to speech at an exact whole-utterance SNR.

    The noise is cropped (or tiled, when shorter than the speech) starting
    at a seed-derived offset, then scaled so that
    20*log10(rms(speech)/rms(scaled_noise)) equals spec.snr_db.
    """
    if speech.sample_rate != noise.sample_rate:
        raise RateMismatch(
            f"speech {speech.sample_rate} Hz vs noise {noise.sample_rate} Hz")
    if len(noise) == 0:
        raise EmptyBuffer("noise buffer is empty")

    n = len(speech)
    rng = np.random.default_rng(seed)
    if len(noise) >= n:
        offset = int(rng.integers(0, len(noise) - n + 1))
        segment = noise.samples[offset:offset + n]
    else:
        offset = int(rng.integers(0, len(noise)))
        reps = int(np.ceil((offset + n) / len(noise)))
        segment = np.tile(noise.samples, reps)[offset:offset + n]

    s_rms = rms(speech)
    n_rms = float(np.sqrt(np.mean(segment ** 2)))
    if s_rms == 0.0 or n_rms == 0.0:
        raise SilentInput("cannot set an SNR against a silent component")

    gain = s_rms / (n_rms * 10.0 ** (spec.snr_db / 20.0))
    return AudioBuffer(samples=speech.samples + gain * segment,
                       sample_rate=speech.sample_rate)
