"""Carrier replica generation: float sin/cos, two-term Taylor, quantized LUTs.

The LUT methods index a 64-entry-per-cycle phase table through the top six
bits of a 32-bit phase accumulator; table amplitudes are mid-rise quantized
to n odd integer levels (so n distinct values, +/-1 for LUT2). Table entries
are sampled at bin centers.
"""

import enum

import numpy as np

TWO_PI = 2.0 * np.pi
LUT_SIZE = 64
LUT_SHIFT = 32 - 6          # accumulator top bits -> table index
ACC_MASK = 0xFFFFFFFF


class CarrierMethod(enum.Enum):
    FLOAT_SIN = "float_sin"
    TAYLOR2 = "taylor2"
    LUT16 = "lut16"
    LUT8 = "lut8"
    LUT2 = "lut2"


# Integer method ids for the compiled kernels.
METHOD_ID = {
    CarrierMethod.FLOAT_SIN: 0,
    CarrierMethod.TAYLOR2: 1,
    CarrierMethod.LUT16: 2,
    CarrierMethod.LUT8: 3,
    CarrierMethod.LUT2: 4,
}

_LEVELS = {CarrierMethod.LUT16: 16, CarrierMethod.LUT8: 8, CarrierMethod.LUT2: 2}


def _midrise(x: np.ndarray, levels: int) -> np.ndarray:
    half = levels // 2
    q = np.clip(np.floor(x * half), -half, half - 1)
    return (2.0 * q + 1.0)


def _make_tables():
    centers = TWO_PI * (np.arange(LUT_SIZE) + 0.5) / LUT_SIZE
    tabs = {}
    for method, levels in _LEVELS.items():
        ci = _midrise(np.cos(centers), levels).astype(np.int8)
        si = _midrise(np.sin(centers), levels).astype(np.int8)
        cf = (ci / (levels - 1) if levels > 2 else ci.astype(np.float64)).astype(np.float32)
        sf = (si / (levels - 1) if levels > 2 else si.astype(np.float64)).astype(np.float32)
        tabs[method] = (ci, si, cf, sf)
    return tabs


_TABLES = _make_tables()

# Module-level arrays so the numba kernels can close over them as constants.
LUT16_COS_I8, LUT16_SIN_I8, LUT16_COS_F32, LUT16_SIN_F32 = _TABLES[CarrierMethod.LUT16]
LUT8_COS_I8, LUT8_SIN_I8, LUT8_COS_F32, LUT8_SIN_F32 = _TABLES[CarrierMethod.LUT8]
LUT2_COS_I8, LUT2_SIN_I8, LUT2_COS_F32, LUT2_SIN_F32 = _TABLES[CarrierMethod.LUT2]


def int_tables(method: CarrierMethod):
    ci, si, _, _ = _TABLES[method]
    return ci, si


def float_tables(method: CarrierMethod):
    _, _, cf, sf = _TABLES[method]
    return cf, sf


def phase_to_acc(phase_rad: float) -> int:
    """Map a phase in radians onto the 32-bit accumulator."""
    cycles = phase_rad / TWO_PI
    return int(round((cycles - np.floor(cycles)) * 2.0**32)) & ACC_MASK


def freq_to_inc(freq_hz: float, fs: float) -> int:
    """Per-sample accumulator increment (wraps correctly for negative freq)."""
    return int(round(freq_hz / fs * 2.0**32)) & ACC_MASK


def _taylor2_cos_sin(theta: np.ndarray):
    # Quadrant range reduction, then exactly two Taylor terms per component.
    k = np.round(theta / (np.pi / 2))
    r = theta - k * (np.pi / 2)
    s_r = r - r**3 / 6.0
    c_r = 1.0 - r * r / 2.0
    k = k.astype(np.int64) % 4
    cos = np.choose(k, [c_r, -s_r, -c_r, s_r])
    sin = np.choose(k, [s_r, c_r, -s_r, -c_r])
    return cos, sin


def gen_carrier(method: CarrierMethod, phase0: float, freq: float, fs: float,
                n: int) -> np.ndarray:
    """Generate n samples approximating exp(-j*(phase0 + 2*pi*freq*k/fs))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not isinstance(method, CarrierMethod):
        raise ValueError(f"unknown carrier method {method!r}")
    k = np.arange(n, dtype=np.float64)
    if method is CarrierMethod.FLOAT_SIN:
        return np.exp(-1j * (phase0 + TWO_PI * freq / fs * k))
    if method is CarrierMethod.TAYLOR2:
        theta = phase0 + TWO_PI * freq / fs * k
        theta = theta - np.round(theta / TWO_PI) * TWO_PI
        c, s = _taylor2_cos_sin(theta)
        return c - 1j * s
    cf, sf = float_tables(method)
    acc0 = phase_to_acc(phase0)
    inc = freq_to_inc(freq, fs)
    acc = (acc0 + np.arange(n, dtype=np.uint64) * np.uint64(inc)) & np.uint64(ACC_MASK)
    idx = (acc >> np.uint64(LUT_SHIFT)).astype(np.int64)
    return cf[idx].astype(np.float64) - 1j * sf[idx].astype(np.float64)
