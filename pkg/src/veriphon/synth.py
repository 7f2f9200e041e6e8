"""Deterministic toy corpus: resonator "voices" with shared speaking modes.

Every synthetic speaker shares the same coarse spectral layout (four
resonances) and differs only in where the upper three sit: a small
second-formant offset plus speaker-specific third and fourth resonance
frequencies. Utterances cycle through three speaking-style modes --
bright/sparse, neutral, and muffled/dense -- that move the spectral tilt,
level, and burst structure far more than the identity cues do, the way
session and style variation dwarfs speaker differences in real recordings.
A faint pink recording floor is mixed into every file so that no frame is
digitally silent; the lead silence stretch carries only that floor, which
is what the denoiser's leading-frames noise estimate keys on.

Everything derives from one seed, so a regenerated corpus is bit-identical.
"""

import os

import numpy as np
import scipy.signal

from .audio_io import AudioBuffer, SnrSpec, mix_noise_at_snr, save_wav
from .evaluate import stable_seed
from .manifest import CorpusManifest, SpeakerEntry, save_manifest

SAMPLE_RATE = 16000
LEAD_SILENCE_S = 0.25      # covers the 12 noise-estimation frames
TAIL_SILENCE_S = 0.05
F1_HZ = 450.0              # shared lowest resonance, carries no identity
F2_HZ = 1100.0
F2_SPREAD = 0.08           # +/- fraction spanned by per-speaker F2 offsets
F3_RANGE_HZ = (2150.0, 3050.0)
F4_RANGE_HZ = (3500.0, 5800.0)
FORMANT_JITTER = 0.02      # per-utterance fractional wobble of each resonance
RESONATOR_R_RANGE = (0.975, 0.99)
ENV_FLOOR = 0.02
FLOOR_SNR_DB = (18.0, 30.0)  # recording-floor level relative to the voice

# Speaking-style presets shared by all speakers. Utterance j uses mode
# j % len(MODES), so every speaker's training set covers every mode.
MODES = (
    dict(tilt=+0.45, gain=(0.35, 0.50), bursts=3, width_s=(0.10, 0.16)),
    dict(tilt=0.0, gain=(0.24, 0.36), bursts=4, width_s=(0.07, 0.12)),
    dict(tilt=-0.45, gain=(0.15, 0.26), bursts=6, width_s=(0.04, 0.08)),
)


def _resonator(x, freq_hz, sr, r):
    w = 2.0 * np.pi * freq_hz / sr
    return scipy.signal.lfilter([1.0], [1.0, -2.0 * r * np.cos(w), r * r], x)


def _syllable_envelope(n, sr, rng, n_bursts, width_lo_s, width_hi_s):
    """Gaussian bursts over a low floor; gaps stay just above silence."""
    t = np.arange(n) / sr
    env = np.full(n, ENV_FLOOR)
    for _ in range(n_bursts):
        center = rng.uniform(0.05, n / sr - 0.05)
        width = rng.uniform(width_lo_s, width_hi_s)
        env = np.maximum(env, np.exp(-0.5 * ((t - center) / width) ** 2))
    return env


def speaker_formants(n_speakers, seed):
    """Per-speaker resonance quadruples (F1 shared, F2..F4 identity)."""
    rng = np.random.default_rng(stable_seed(seed, "speaker-cues"))
    f2 = F2_HZ * (1.0 + np.linspace(-F2_SPREAD, F2_SPREAD,
                                    n_speakers)[rng.permutation(n_speakers)])
    f3 = np.geomspace(*F3_RANGE_HZ, n_speakers)[rng.permutation(n_speakers)]
    f4 = np.geomspace(*F4_RANGE_HZ, n_speakers)[rng.permutation(n_speakers)]
    return [np.array([F1_HZ, f2[i], f3[i], f4[i]]) for i in range(n_speakers)]


def make_utterance(formants, seed, sr=SAMPLE_RATE, duration_s=1.8,
                   duration_spread_s=0.2, mode=None,
                   noise_floor=None) -> AudioBuffer:
    """One voiced stretch for a speaker described by its resonance set."""
    mode = MODES[1] if mode is None else mode
    rng = np.random.default_rng(seed)
    n_active = int(rng.uniform(duration_s - duration_spread_s,
                               duration_s + duration_spread_s) * sr)
    excitation = rng.normal(size=n_active)
    voiced = np.zeros(n_active)
    r = rng.uniform(*RESONATOR_R_RANGE)
    for k, f in enumerate(formants):
        jitter = 1.0 + FORMANT_JITTER * rng.normal()
        amp = rng.uniform(0.7, 1.0) if k >= 2 else rng.uniform(0.5, 1.0)
        voiced += amp * _resonator(excitation, f * jitter, sr, r)
    voiced = scipy.signal.lfilter([1.0, -mode["tilt"]], [1.0], voiced)
    voiced *= _syllable_envelope(n_active, sr, rng, mode["bursts"],
                                 *mode["width_s"])
    voiced *= rng.uniform(*mode["gain"]) / np.max(np.abs(voiced))
    samples = np.concatenate([np.zeros(int(LEAD_SILENCE_S * sr)), voiced,
                              np.zeros(int(TAIL_SILENCE_S * sr))])
    buf = AudioBuffer(samples=samples, sample_rate=sr)
    if noise_floor is not None:
        snr = rng.uniform(*FLOOR_SNR_DB)
        buf = mix_noise_at_snr(buf, noise_floor, SnrSpec(snr),
                               int(rng.integers(1 << 31)))
    return buf


def make_colored_noise(seed, sr=SAMPLE_RATE, duration_s=30.0,
                       tilt: float = 1.0) -> AudioBuffer:
    """Gaussian noise shaped to a 1/f^tilt spectrum (tilt 0 = white)."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sr))
    spectrum = np.fft.rfft(rng.normal(size=n))
    freqs = np.fft.rfftfreq(n, d=1.0 / sr)
    shape = np.ones_like(freqs)
    shape[1:] = (freqs[1:] / freqs[1]) ** (-tilt / 2.0)
    shape[0] = 0.0  # no DC
    samples = np.fft.irfft(spectrum * shape, n=n)
    samples *= 0.3 / np.max(np.abs(samples))
    return AudioBuffer(samples=samples, sample_rate=sr)


def synth_corpus(out_dir, n_speakers=6, n_train=7, n_test=2, seed=0,
                 sr=SAMPLE_RATE, duration_s=1.8) -> CorpusManifest:
    """Generate WAVs + manifest.json under out_dir; returns the manifest."""
    os.makedirs(os.path.join(out_dir, "audio"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "noise"), exist_ok=True)

    formant_sets = speaker_formants(n_speakers, seed)
    floor = make_colored_noise(stable_seed(seed, "rumble"), sr=sr, tilt=1.0)
    speakers = []
    for i, formants in enumerate(formant_sets):
        spk_id = f"spk{i:02d}"
        train, test = [], []
        for j in range(n_train + n_test):
            utt = make_utterance(formants,
                                 seed=stable_seed(seed, "utt", spk_id, j),
                                 sr=sr, duration_s=duration_s,
                                 mode=MODES[j % len(MODES)],
                                 noise_floor=floor)
            rel = os.path.join("audio", f"{spk_id}_u{j:02d}.wav")
            save_wav(os.path.join(out_dir, rel), utt)
            (train if j < n_train else test).append(rel)
        speakers.append(SpeakerEntry(id=spk_id, train=tuple(train),
                                     test=tuple(test)))

    noises = {}
    for name, tilt in (("pink", 1.0), ("white", 0.0)):
        rel = os.path.join("noise", f"{name}.wav")
        save_wav(os.path.join(out_dir, rel),
                 make_colored_noise(stable_seed(seed, "noise", name),
                                    sr=sr, tilt=tilt))
        noises[name] = rel

    manifest = CorpusManifest(speakers=tuple(speakers), noises=noises,
                              sample_rate=sr, root=out_dir)
    save_manifest(manifest, os.path.join(out_dir, "manifest.json"))
    return manifest
