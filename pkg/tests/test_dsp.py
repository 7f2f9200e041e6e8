"""Pre-emphasis, framing, Hann windowing, and the one-sided power spectrum."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles

from veriphon.audio_io import AudioBuffer
from veriphon.dsp import (FrameConfig, analyze, frame_and_window,
                          hann_periodic, power_spectrum, pre_emphasize)
from veriphon.errors import BadNfft, EmptyBuffer, TooShort

SR = 16000


def _buf(x, sr=SR):
    return AudioBuffer(samples=np.asarray(x, dtype=float), sample_rate=sr)


# --- FrameConfig --------------------------------------------------------

def test_frame_config_defaults():
    cfg = FrameConfig()
    assert (cfg.frame_len_ms, cfg.hop_ms, cfg.preemph, cfg.nfft) == (25.0, 10.0, 0.97, 512)
    assert cfg.frame_samples(SR) == 400
    assert cfg.hop_samples(SR) == 160


@pytest.mark.parametrize("kwargs", [
    {"frame_len_ms": 0.0},
    {"hop_ms": 0.0},
    {"hop_ms": 30.0},            # hop beyond the frame
    {"preemph": 1.0},
    {"preemph": -0.1},
])
def test_frame_config_validation(kwargs):
    with pytest.raises(ValueError):
        FrameConfig(**kwargs)


# --- pre-emphasis -------------------------------------------------------

def test_preemphasis_alpha_zero_is_identity():
    x = np.sin(np.linspace(0, 5, 300))
    np.testing.assert_array_equal(pre_emphasize(_buf(x), 0.0).samples, x)


def test_preemphasis_constant_input():
    y = pre_emphasize(_buf(np.ones(5)), 0.97).samples
    np.testing.assert_allclose(y, [1.0, 0.03, 0.03, 0.03, 0.03], atol=1e-15)


def test_preemphasis_impulse():
    y = pre_emphasize(_buf([1.0, 0.0, 0.0]), 0.97).samples
    np.testing.assert_allclose(y, [1.0, -0.97, 0.0], atol=1e-15)


def test_preemphasis_matches_scalar_loop():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(257)
    np.testing.assert_allclose(pre_emphasize(_buf(x), 0.97).samples,
                               oracles.preemphasis(x, 0.97), atol=1e-12)


def test_preemphasis_errors():
    with pytest.raises(EmptyBuffer):
        pre_emphasize(_buf(np.zeros(0)), 0.97)
    for alpha in (1.0, 1.5, -0.01):
        with pytest.raises(ValueError):
            pre_emphasize(_buf(np.ones(4)), alpha)


# --- windowing and framing ----------------------------------------------

def test_hann_periodic_formula_and_midpoint():
    n = 400
    w = hann_periodic(n)
    np.testing.assert_allclose(w, oracles.hann(n), atol=1e-15)
    assert w[n // 2] == 1.0
    assert w[0] == 0.0


def test_exact_one_frame():
    frames = frame_and_window(_buf(np.ones(400)), FrameConfig())
    assert frames.shape == (1, 400)
    np.testing.assert_allclose(frames[0], hann_periodic(400), atol=1e-15)


def test_one_second_gives_98_frames():
    frames = frame_and_window(_buf(np.zeros(SR)), FrameConfig())
    assert frames.shape == (98, 400)


def test_framing_matches_index_loop():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(2000)
    got = frame_and_window(_buf(x), FrameConfig())
    np.testing.assert_allclose(got, oracles.frames_windowed(x), atol=1e-12)


def test_too_short_raises():
    with pytest.raises(TooShort):
        frame_and_window(_buf(np.zeros(399)), FrameConfig())


# --- power spectrum -----------------------------------------------------

def test_power_spectrum_zero_frame():
    out = power_spectrum(np.zeros((1, 400)), 512).power
    assert out.shape == (1, 257)
    assert np.all(out == 0.0)


def test_power_spectrum_constant_frame_is_dc_only():
    c, n = 0.7, 512
    out = power_spectrum(np.full((1, n), c), n).power
    assert out[0, 0] == pytest.approx((c * n) ** 2, rel=1e-12)
    assert np.all(out[0, 1:] <= 1e-9 * out[0, 0])


def test_power_spectrum_matches_direct_dft():
    rng = np.random.default_rng(2)
    frame = rng.standard_normal(8)
    got = power_spectrum(frame[None, :], 8).power[0]
    want = np.array(oracles.dft_power_scalar(frame, 8))
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 21, 32])
def test_power_spectrum_direct_dft_short_frames(n):
    rng = np.random.default_rng(n)
    frames = rng.standard_normal((3, n))
    got = power_spectrum(frames, 32).power
    want = oracles.power_spectrum(frames, 32)
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-10)


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_parseval_with_one_sided_doubling(seed):
    rng = np.random.default_rng(seed)
    frame = rng.standard_normal(64)
    spec = power_spectrum(frame[None, :], 64).power[0]
    folded = spec[0] + 2.0 * spec[1:-1].sum() + spec[-1]
    assert folded == pytest.approx(64 * np.sum(frame ** 2), rel=1e-8)


@pytest.mark.parametrize("nfft", [0, 100, 384, 511])
def test_power_spectrum_rejects_non_power_of_two(nfft):
    with pytest.raises(BadNfft):
        power_spectrum(np.zeros((1, 64)), nfft)


def test_power_spectrum_rejects_nfft_below_frame():
    with pytest.raises(BadNfft):
        power_spectrum(np.zeros((1, 400)), 256)


# --- analyze ------------------------------------------------------------

def test_analyze_shapes_and_frame_rate():
    spec = analyze(_buf(np.random.default_rng(3).standard_normal(SR)),
                   FrameConfig())
    assert spec.power.shape == (98, 257)
    assert spec.frame_rate == pytest.approx(100.0)
    assert spec.nfft == 512


def test_analyze_preemph_flag():
    rng = np.random.default_rng(4)
    buf = _buf(rng.standard_normal(1200))
    plain = analyze(buf, FrameConfig(), preemph=False)
    emphasized = analyze(buf, FrameConfig(), preemph=True)
    raw_frames = frame_and_window(buf, FrameConfig())
    np.testing.assert_allclose(plain.power,
                               power_spectrum(raw_frames, 512).power, atol=1e-12)
    assert not np.allclose(plain.power, emphasized.power)
