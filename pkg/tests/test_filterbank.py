"""Mel/Bark frequency warps and the triangular filterbank."""

import math

import numpy as np
import pytest

import oracles

from veriphon.dsp import Spectrogram
from veriphon.errors import BadRange, NegativeFrequency, ShapeMismatch
from veriphon.filterbank import (WarpScale, apply_filterbank, bark_to_hz,
                                 build_filterbank, hz_to_bark, hz_to_mel,
                                 mel_to_hz)

SR, NFFT, NBINS = 16000, 512, 257


def _spec(power):
    return Spectrogram(power=np.asarray(power, dtype=float),
                       frame_rate=100.0, nfft=NFFT)


# --- warps --------------------------------------------------------------

def test_mel_anchors():
    assert hz_to_mel(0.0) == 0.0
    assert hz_to_mel(1000.0) == pytest.approx(1000.0, abs=0.1)
    assert hz_to_mel(1000.0) == pytest.approx(2595.0 * math.log10(1 + 1000.0 / 700.0),
                                              abs=1e-9)


def test_bark_anchors():
    assert hz_to_bark(0.0) == 0.0
    assert hz_to_bark(600.0) == pytest.approx(6.0 * math.log(1.0 + math.sqrt(2.0)),
                                              abs=1e-9)


@pytest.mark.parametrize("f", [100.0, 4000.0, 7999.0])
def test_mel_round_trip(f):
    assert mel_to_hz(hz_to_mel(f)) == pytest.approx(f, abs=1e-9)


@pytest.mark.parametrize("f", [50.0, 600.0, 8000.0])
def test_bark_round_trip(f):
    assert bark_to_hz(hz_to_bark(f)) == pytest.approx(f, abs=1e-9)


def test_forward_warps_reject_negative_frequency():
    for fn in (hz_to_mel, hz_to_bark):
        with pytest.raises(NegativeFrequency):
            fn(-1.0)
        with pytest.raises(NegativeFrequency):
            fn(np.array([10.0, -1e-9]))


def test_warps_strictly_increasing():
    freqs = np.linspace(0.0, 8000.0, 400)
    for fn in (hz_to_mel, hz_to_bark):
        vals = np.array([fn(f) for f in freqs])
        assert np.all(np.diff(vals) > 0)


def test_warps_match_oracle_formulas():
    freqs = np.linspace(0.0, 8000.0, 97)
    np.testing.assert_allclose([hz_to_mel(f) for f in freqs],
                               [oracles.mel(f) for f in freqs], rtol=1e-12)
    np.testing.assert_allclose([hz_to_bark(f) for f in freqs],
                               [oracles.bark(f) for f in freqs], rtol=1e-12)


# --- bank construction --------------------------------------------------

def test_single_filter_peaks_at_warp_midpoint():
    for scale, fwd, inv in ((WarpScale.MEL, oracles.mel, oracles.mel_inv),
                            (WarpScale.BARK, oracles.bark, oracles.bark_inv)):
        bank = build_filterbank(scale, 1, NFFT, SR)
        mid = inv((fwd(0.0) + fwd(SR / 2)) / 2.0)
        assert bank.center_freqs[0] == pytest.approx(mid, rel=1e-9)
        peak_bin = int(np.argmax(bank.weights[0]))
        bin_hz = SR / NFFT
        assert abs(peak_bin * bin_hz - mid) <= bin_hz


def test_row_peak_is_one_when_center_lands_on_a_bin():
    # choose f_hi so the single filter's mel midpoint is exactly 1000 Hz,
    # which is representable: bin 32 of a 512-point grid at 16 kHz
    f_hi = oracles.mel_inv(2.0 * oracles.mel(1000.0))
    bank = build_filterbank(WarpScale.MEL, 1, NFFT, SR, f_lo=0.0, f_hi=f_hi)
    assert bank.weights[0, 32] == pytest.approx(1.0, abs=1e-12)
    assert np.max(bank.weights[0]) == bank.weights[0, 32]


def test_center_freqs_increase_and_match_recomputed_edges():
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    assert np.all(np.diff(bank.center_freqs) > 0)
    _, centers = oracles.triangle_weights(oracles.mel, oracles.mel_inv,
                                          n_filters=40)
    np.testing.assert_allclose(bank.center_freqs, centers, rtol=1e-9)


@pytest.mark.parametrize("scale,fwd,inv", [
    (WarpScale.MEL, oracles.mel, oracles.mel_inv),
    (WarpScale.BARK, oracles.bark, oracles.bark_inv),
])
def test_weights_match_per_bin_loop(scale, fwd, inv):
    bank = build_filterbank(scale, 40, NFFT, SR)
    want, _ = oracles.triangle_weights(fwd, inv, n_filters=40)
    assert bank.weights.shape == (40, NBINS)
    np.testing.assert_allclose(bank.weights, want, atol=1e-10)


def test_coverage_between_outer_feet():
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    bin_hz = SR / NFFT
    col = bank.weights.sum(axis=0)
    for b in range(NBINS):
        f = b * bin_hz
        if 0.0 < f < SR / 2:
            assert col[b] > 0.0, f"uncovered bin {b} at {f} Hz"


@pytest.mark.parametrize("kwargs", [
    {"n_filters": 0},
    {"f_lo": -10.0},
    {"f_hi": 9000.0},
    {"f_lo": 5000.0, "f_hi": 4000.0},
    {"f_lo": 4000.0, "f_hi": 4000.0},
])
def test_bad_range_rejected(kwargs):
    kw = {"n_filters": 40, **kwargs}
    with pytest.raises(BadRange):
        build_filterbank(WarpScale.MEL, kw.pop("n_filters"), NFFT, SR, **kw)


# --- application --------------------------------------------------------

def test_apply_zero_spectrogram():
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    out = apply_filterbank(bank, _spec(np.zeros((3, NBINS))))
    assert out.shape == (3, 40)
    assert np.all(out == 0.0)


def test_apply_one_hot_reads_off_the_weight_column():
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    peak_bin = int(np.argmax(bank.weights[5]))
    power = np.zeros((1, NBINS))
    power[0, peak_bin] = 1.0
    out = apply_filterbank(bank, _spec(power))
    np.testing.assert_allclose(out[0], bank.weights[:, peak_bin], atol=1e-15)


def test_apply_matches_double_loop():
    rng = np.random.default_rng(9)
    power = rng.uniform(0.0, 4.0, (4, NBINS))
    bank = build_filterbank(WarpScale.BARK, 40, NFFT, SR)
    got = apply_filterbank(bank, _spec(power))
    want = oracles.band_energies_loop(power, bank.weights)
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_apply_is_monotone_in_the_spectrum():
    rng = np.random.default_rng(10)
    base = rng.uniform(0.0, 1.0, (2, NBINS))
    bumped = base + rng.uniform(0.0, 0.5, (2, NBINS))
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    assert np.all(apply_filterbank(bank, _spec(bumped))
                  >= apply_filterbank(bank, _spec(base)) - 1e-12)


def test_apply_frame_permutation_equivariance():
    rng = np.random.default_rng(11)
    power = rng.uniform(0.0, 1.0, (6, NBINS))
    perm = rng.permutation(6)
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    np.testing.assert_array_equal(apply_filterbank(bank, _spec(power[perm])),
                                  apply_filterbank(bank, _spec(power))[perm])


def test_apply_shape_mismatch():
    bank = build_filterbank(WarpScale.MEL, 40, NFFT, SR)
    with pytest.raises(ShapeMismatch):
        apply_filterbank(bank, Spectrogram(power=np.zeros((2, 129)),
                                           frame_rate=100.0, nfft=256))
