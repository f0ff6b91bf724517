"""Acquisition engines: oracle equivalence, peak detection, QoS rules."""

import numpy as np
import pytest

from gpssdr.acq import (AcqConfig, QosPolicy, ReacquireReason, acquire_joint,
                        acquire_pcs, detect_peak, qos_should_reacquire, wipe_if)
from gpssdr.samples import SampleFormat, SampleKind, ingest
from gpssdr.sim import SatScenario, Scenario, simulate_to_array

FS = 5e6
FMT = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, FS)


def sim_block(sats, n_ms, seed=0, fs=FS):
    fmt = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, fs)
    sc = Scenario(sats=sats, fmt=fmt, duration_s=n_ms * 1e-3, seed=seed)
    arr, truth = simulate_to_array(sc, block_ms=float(n_ms))
    return ingest(arr.tobytes(), fmt).samples, truth


def test_spectrum_rotation_is_time_mixing():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
    n = np.arange(4096)
    for k in (1, 5, -3):
        a = np.fft.fft(x * np.exp(2j * np.pi * k * n / 4096))
        b = np.roll(np.fft.fft(x), k)
        assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-9


def test_simulated_signal_detected_with_truth_parameters():
    sats = [SatScenario(prn=7, cn0_dbhz=None, code_phase_chips=770.53,
                        doppler_hz=2500.0)]
    x, truth = sim_block(sats, 4)
    cfg = AcqConfig(coherent_ms=4, search_band_hz=10e3, prns=(7,))
    for engine in (acquire_pcs, acquire_joint):
        res = engine(x, FS, cfg)[0]
        assert res.detected
        assert res.doppler_hz == pytest.approx(2500.0, abs=125.0)
        truth_cp = truth.code_phase_samples(7, 0, FS)
        assert abs(res.code_phase_samples - truth_cp) <= 0.6


def test_engines_identical_peaks_on_random_scenarios():
    rng = np.random.default_rng(9)
    for trial in range(6):
        prn = int(rng.integers(1, 33))
        sats = [SatScenario(prn=prn, cn0_dbhz=45.0,
                            code_phase_chips=float(rng.uniform(0, 1023)),
                            doppler_hz=float(rng.uniform(-4500, 4500)))]
        x, _ = sim_block(sats, 2, seed=trial, fs=2.046e6)
        cfg = AcqConfig(coherent_ms=2, search_band_hz=10e3, prns=(prn,))
        rp = acquire_pcs(x, 2.046e6, cfg)[0]
        rj = acquire_joint(x, 2.046e6, cfg)[0]
        assert (rp.doppler_hz, rp.code_phase_samples) == \
            (rj.doppler_hz, rj.code_phase_samples)
        assert rp.detection_ratio == pytest.approx(rj.detection_ratio, rel=1e-6)


def test_engine_surfaces_match_within_tolerance():
    sats = [SatScenario(prn=3, cn0_dbhz=40.0, code_phase_chips=123.4,
                        doppler_hz=-1750.0)]
    x, _ = sim_block(sats, 4)
    cfg = AcqConfig(coherent_ms=4, search_band_hz=10e3, prns=(3,))
    rp = acquire_pcs(x, FS, cfg)[0]
    rj = acquire_joint(x, FS, cfg)[0]
    assert rp.detection_ratio == pytest.approx(rj.detection_ratio, rel=1e-6)


def test_all_zero_input_not_detected():
    x = np.zeros(4 * 5000, dtype=np.complex128)
    cfg = AcqConfig(coherent_ms=4, search_band_hz=10e3, prns=(1, 2, 3))
    for res in acquire_joint(x, FS, cfg):
        assert not res.detected
        assert res.detection_ratio == 1.0


def test_detection_shift_covariance():
    sats = [SatScenario(prn=9, cn0_dbhz=None, code_phase_chips=100.0,
                        doppler_hz=1000.0)]
    x, _ = sim_block(sats, 4)
    cfg = AcqConfig(coherent_ms=4, search_band_hz=10e3, prns=(9,))
    r0 = acquire_joint(x, FS, cfg)[0]
    d = 137
    r1 = acquire_joint(np.roll(x, d), FS, cfg)[0]
    assert r1.code_phase_samples == (r0.code_phase_samples + d) % 5000
    assert abs(r1.detection_ratio - r0.detection_ratio) < 1e-6 * r0.detection_ratio


def test_wrong_length_rejected():
    cfg = AcqConfig(coherent_ms=4, search_band_hz=10e3, prns=(1,))
    with pytest.raises(ValueError):
        acquire_joint(np.zeros(1234, dtype=complex), FS, cfg)


def test_band_not_integer_bins_warns_and_rounds_outward():
    x = np.zeros(1 * 5000, dtype=np.complex128)
    cfg = AcqConfig(coherent_ms=1, search_band_hz=10e3 + 500, prns=(1,))
    with pytest.warns(UserWarning):
        acquire_joint(x, FS, cfg)


def test_wipe_if_brings_real_signal_to_baseband():
    fs = 5e6
    fmt = SampleFormat(SampleKind.REAL_INT8_WITH_IF, fs, 1.25e6)
    sc = Scenario(sats=[SatScenario(prn=4, cn0_dbhz=None, code_phase_chips=0.0,
                                    doppler_hz=1500.0)],
                  fmt=fmt, duration_s=0.004, seed=0)
    arr, truth = simulate_to_array(sc, block_ms=4.0)
    x = ingest(arr.tobytes(), fmt).samples
    xb = wipe_if(x, fmt.intermediate_frequency, fs)
    cfg = AcqConfig(coherent_ms=4, search_band_hz=10e3, prns=(4,))
    res = acquire_joint(xb, fs, cfg)[0]
    assert res.detected
    assert res.doppler_hz == pytest.approx(1500.0, abs=125.0)


def test_detect_peak_examples():
    surface = np.zeros((3, 200))
    surface[1, 50] = 100.0
    (cell, ratio) = detect_peak(surface, samples_per_chip=4.9)
    assert cell == (1, 50)
    assert ratio == np.finfo(np.float64).max

    flat = np.ones((2, 100))
    _, ratio = detect_peak(flat, 4.9)
    assert ratio == 1.0

    two = np.zeros((1, 300))
    two[0, 10] = 10.0
    two[0, 200] = 5.0
    cell, ratio = detect_peak(two, 4.9)
    assert cell == (0, 10) and ratio == pytest.approx(2.0)


def test_detect_peak_excludes_one_chip_neighborhood():
    s = np.zeros((1, 100))
    s[0, 50] = 10.0
    s[0, 52] = 9.0   # inside +/-1 chip at 4.9 samples/chip
    s[0, 80] = 4.0
    _, ratio = detect_peak(s, 4.9)
    assert ratio == pytest.approx(10.0 / 4.0)


def test_qos_rules():
    pol = QosPolicy()
    go, reason = qos_should_reacquire(3, 10, 0, [45.0] * 3, pol)
    assert go and reason is ReacquireReason.BELOW_MIN_PVT

    go, reason = qos_should_reacquire(10, 10, 0, [45.0] * 10, pol)
    assert not go and reason is ReacquireReason.NONE

    go, reason = qos_should_reacquire(7, 10, 3, [45.0] * 7, pol)
    assert go and reason is ReacquireReason.DROP_RATE

    go, reason = qos_should_reacquire(6, 6, 0, [45, 45, 45, 45, 39, 38], pol)
    assert go and reason is ReacquireReason.QUALITY
