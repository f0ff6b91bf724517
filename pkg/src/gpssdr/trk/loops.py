"""Tracking discriminators and loop-filter update.

All functions are numba-compiled scalar math so the block driver can call
them per epoch; they are equally callable from Python for unit testing.
"""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def dll_discriminator(ie, qe, il, ql, spacing):
    """Normalized early-minus-late power, scaled to chips for small errors."""
    e = math.sqrt(ie * ie + qe * qe)
    l = math.sqrt(il * il + ql * ql)
    if e + l == 0.0:
        return 0.0
    return (1.0 - spacing) * (e - l) / (e + l)


@njit(cache=True, nogil=True)
def pll_discriminator(ip, qp):
    """Costas arctangent phase error in rad, range (-pi/2, pi/2]."""
    if ip == 0.0:
        if qp == 0.0:
            return 0.0
        return math.pi / 2.0
    return math.atan(qp / ip)


@njit(cache=True, nogil=True)
def fll_discriminator(ip_prev, qp_prev, ip, qp, dt):
    """Cross/dot frequency error in Hz over consecutive prompt vectors."""
    cross = ip_prev * qp - qp_prev * ip
    dot = ip_prev * ip + qp_prev * qp
    if cross == 0.0 and dot == 0.0:
        return 0.0
    return math.atan2(cross, dot) / (TWO_PI * dt)


@njit(cache=True, nogil=True)
def loop_update(doppler, code_rate_corr, pll_int, dll_int,
                e_dll, e_pll, e_fll, dt, fll_weight,
                k1_dll, k2_dll, k1_pll, k2_pll, k_fll):
    """One epoch of the second-order PI filters with decaying FLL assist.

    Returns (doppler_hz, dll_correction_chips_s, pll_int, dll_int).
    """
    pll_int = pll_int + k2_pll * e_pll * dt + fll_weight * k_fll * TWO_PI * e_fll * dt
    doppler = (pll_int + k1_pll * e_pll) / TWO_PI
    dll_int = dll_int + k2_dll * e_dll * dt
    code_corr = dll_int + k1_dll * e_dll
    return doppler, code_corr, pll_int, dll_int


def second_order_gains(noise_bandwidth_hz, damping=0.7071067811865476):
    """(k1, k2) for a 2nd-order PI loop from its noise bandwidth."""
    w0 = noise_bandwidth_hz / (damping + 1.0 / (4.0 * damping)) * 4.0 / 2.0
    # Bn = w0 (zeta + 1/(4 zeta)) / 2  ->  w0 = 2 Bn / (zeta + 1/(4 zeta))
    w0 = 2.0 * noise_bandwidth_hz / (damping + 1.0 / (4.0 * damping))
    return 2.0 * damping * w0, w0 * w0


def first_order_gain(noise_bandwidth_hz):
    """Integrator gain of a 1st-order loop: Bn = w0/4."""
    return 4.0 * noise_bandwidth_hz
