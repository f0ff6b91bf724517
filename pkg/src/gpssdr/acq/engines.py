"""Code-phase/Doppler search engines.

Both engines share one Doppler grid: bins spaced 1/T_coh, i.e. exactly one
transform bin, so a Doppler hypothesis is a circular rotation of the input
spectrum. acquire_pcs is the conventional search (mix, forward transform,
conjugate multiply, inverse transform per PRN and bin). acquire_joint
computes the input transform once; because the replica is periodic over one
code period its spectrum only occupies every K-th bin (K = periods per
block), so each hypothesis folds to an L-point inverse transform of the
decimated, rotated spectrum. Peak cells match PCS exactly on the grid.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..cacode import generate_ca_code, resample_code
from ..constants import CHIP_RATE_HZ

_COHERENT_MS_OPTIONS = (1, 2, 4, 8, 16, 32)
_SEARCH_BAND_OPTIONS = (10e3, 12e3, 14e3, 16e3, 18e3, 20e3)


@dataclass
class AcqConfig:
    coherent_ms: int = 4
    search_band_hz: float = 10e3        # total width, centered on 0 (or IF)
    threshold: float = 2.0
    prns: tuple = tuple(range(1, 33))

    def __post_init__(self):
        if self.coherent_ms not in _COHERENT_MS_OPTIONS:
            raise ValueError(
                f"coherent_ms {self.coherent_ms} not in {_COHERENT_MS_OPTIONS}")
        if self.search_band_hz <= 0:
            raise ValueError("search_band_hz must be positive")

    @property
    def bin_spacing_hz(self) -> float:
        return 1000.0 / self.coherent_ms


@dataclass
class AcqResult:
    prn: int
    doppler_hz: float
    code_phase_samples: int
    detection_ratio: float
    detected: bool


def wipe_if(samples: np.ndarray, intermediate_frequency: float, fs: float,
            start_index: int = 0) -> np.ndarray:
    """Mix a real-IF block down to complex baseband before acquisition."""
    if intermediate_frequency == 0.0:
        return samples
    n = np.arange(start_index, start_index + len(samples), dtype=np.float64)
    return samples * np.exp(-2j * np.pi * intermediate_frequency / fs * n)


def _grid(cfg: AcqConfig, fs: float):
    spb = fs / 1000.0
    if abs(spb - round(spb)) > 1e-9:
        raise ValueError("sampling rate must give an integer number of "
                         "samples per code period")
    samples_per_code = int(round(spb))
    n = samples_per_code * cfg.coherent_ms
    half_bins = cfg.search_band_hz / 2.0 / cfg.bin_spacing_hz
    k_max = int(math.ceil(half_bins - 1e-9))
    if abs(half_bins - round(half_bins)) > 1e-9:
        warnings.warn("search band is not an integer number of Doppler bins; "
                      "rounding outward", stacklevel=2)
    k_offsets = np.arange(-k_max, k_max + 1)
    return samples_per_code, n, k_offsets


def _replica_spectrum_l(prn: int, fs: float, samples_per_code: int):
    code = resample_code(generate_ca_code(prn), fs, 0.0, 0.0, samples_per_code)
    return np.conj(np.fft.fft(code.astype(np.float64)))


def acquire_pcs(samples: np.ndarray, fs: float, cfg: AcqConfig):
    """Conventional parallel code-phase search over every PRN and bin."""
    samples_per_code, n, k_offsets = _grid(cfg, fs)
    if len(samples) != n:
        raise ValueError(f"expected {n} samples (= coherent_ms x fs), "
                         f"got {len(samples)}")
    x = np.asarray(samples, dtype=np.complex128)
    k_codes = cfg.coherent_ms
    t = np.arange(n, dtype=np.float64) / fs
    results = []
    spc = fs / CHIP_RATE_HZ
    for prn in cfg.prns:
        code_l = resample_code(generate_ca_code(prn), fs, 0.0, 0.0, samples_per_code)
        replica = np.tile(code_l.astype(np.float64), k_codes)
        code_spec_conj = np.conj(np.fft.fft(replica))
        surface = np.empty((len(k_offsets), samples_per_code))
        for row, k in enumerate(k_offsets):
            fd = k * cfg.bin_spacing_hz
            wiped = x * np.exp(-2j * np.pi * fd * t)
            corr = np.fft.ifft(np.fft.fft(wiped) * code_spec_conj)
            surface[row] = np.abs(corr[:samples_per_code]) ** 2
        results.append(_result_from_surface(prn, surface, k_offsets,
                                            cfg, spc))
    return results


def acquire_joint(samples: np.ndarray, fs: float, cfg: AcqConfig):
    """Joint search reusing one forward transform for all PRNs and bins."""
    samples_per_code, n, k_offsets = _grid(cfg, fs)
    if len(samples) != n:
        raise ValueError(f"expected {n} samples (= coherent_ms x fs), "
                         f"got {len(samples)}")
    x_spec = np.fft.fft(np.asarray(samples, dtype=np.complex128))
    k_codes = cfg.coherent_ms
    spc = fs / CHIP_RATE_HZ
    m = np.arange(samples_per_code)
    # decimated, rotated spectrum per Doppler bin: X[(m*K + k) mod N]
    idx = (m[None, :] * k_codes + k_offsets[:, None]) % n
    x_dec = x_spec[idx]
    results = []
    for prn in cfg.prns:
        spec = _replica_spectrum_l(prn, fs, samples_per_code)
        corr = np.fft.ifft(x_dec * spec[None, :], axis=1)
        surface = np.abs(corr) ** 2
        results.append(_result_from_surface(prn, surface, k_offsets,
                                            cfg, spc))
    return results


def _result_from_surface(prn, surface, k_offsets, cfg, samples_per_chip):
    (row, col), ratio = detect_peak(surface, samples_per_chip)
    return AcqResult(
        prn=prn,
        doppler_hz=float(k_offsets[row] * cfg.bin_spacing_hz),
        code_phase_samples=int(col),
        detection_ratio=ratio,
        detected=bool(ratio >= cfg.threshold),
    )


def detect_peak(surface: np.ndarray, samples_per_chip: float):
    """Peak cell and peak-to-second-peak ratio on a 2-D magnitude surface.

    The second peak is the largest cell whose code-phase column lies outside
    +/- one chip (circularly) of the peak column. Ratio 1.0 when no eligible
    second peak exists; a zero second peak with a positive first is capped
    at the largest finite float.
    """
    surface = np.atleast_2d(np.asarray(surface))
    if surface.size == 0:
        raise ValueError("empty surface")
    flat_idx = int(np.argmax(surface))
    row, col = np.unravel_index(flat_idx, surface.shape)
    peak = float(surface[row, col])
    n_cols = surface.shape[1]
    guard = int(math.ceil(samples_per_chip))
    col_mask = np.ones(n_cols, dtype=bool)
    offsets = (np.arange(-guard, guard + 1) + col) % n_cols
    col_mask[offsets] = False
    if not col_mask.any():
        return (int(row), int(col)), 1.0
    second = float(surface[:, col_mask].max())
    if second <= 0.0:
        ratio = 1.0 if peak <= 0.0 else float(np.finfo(np.float64).max)
    else:
        ratio = peak / second
    return (int(row), int(col)), ratio
