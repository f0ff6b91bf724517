import math

import numpy as np
import pytest

from gpssdr.trk.loops import (dll_discriminator, fll_discriminator,
                              first_order_gain, loop_update,
                              pll_discriminator, second_order_gains)


def test_dll_balanced_is_zero():
    assert dll_discriminator(1.0, 0.0, 1.0, 0.0, 0.5) == 0.0
    assert dll_discriminator(0.0, 0.0, 0.0, 0.0, 0.5) == 0.0


def test_dll_full_early_max():
    # E=2, L=0 -> half of the spacing-scaled maximum
    e = dll_discriminator(2.0, 0.0, 0.0, 0.0, 0.5)
    assert e == pytest.approx(0.5)


def test_dll_triangle_model_offset():
    # ideal triangle correlation, offset 0.1 chip, spacing 0.5
    eps, d, amp = 0.1, 0.5, 1000.0
    e_mag = amp * (1.0 - abs(eps - d))
    l_mag = amp * (1.0 - abs(eps + d))
    e = dll_discriminator(e_mag, 0.0, l_mag, 0.0, d)
    assert e == pytest.approx(0.1, abs=0.005)


def test_pll_examples():
    assert pll_discriminator(1.0, 0.0) == 0.0
    assert pll_discriminator(1.0, 1.0) == pytest.approx(math.pi / 4)
    # bit-flip invariance
    assert pll_discriminator(-1.0, 0.0) == 0.0
    assert pll_discriminator(-1.0, -1.0) == pytest.approx(math.pi / 4)
    assert pll_discriminator(0.0, 0.5) == pytest.approx(math.pi / 2)


def test_fll_examples():
    assert fll_discriminator(1.0, 0.0, 1.0, 0.0, 1e-3) == 0.0
    # 90 degree advance over 1 ms -> 250 Hz
    assert fll_discriminator(1.0, 0.0, 0.0, 1.0, 1e-3) == pytest.approx(250.0)
    assert fll_discriminator(1.0, 0.0, 0.0, -1.0, 1e-3) == pytest.approx(-250.0)


def test_loop_update_zero_errors_keeps_ncos():
    doppler, corr, pll_int, dll_int = loop_update(
        123.0, 0.0, 2 * math.pi * 123.0, 0.5, 0.0, 0.0, 0.0, 1e-3, 0.0,
        1.0, 2.0, 3.0, 4.0, 5.0)
    assert doppler == pytest.approx(123.0)
    assert corr == pytest.approx(0.5)


def test_loop_update_pi_recurrence():
    # constant phase error: doppler = (int + k1*e)/2pi with int += k2*e*dt
    k1, k2 = 10.0, 100.0
    e = 0.2
    dt = 1e-3
    pll_int = 0.0
    for n in range(1, 6):
        doppler, _, pll_int, _ = loop_update(0.0, 0.0, pll_int, 0.0,
                                             0.0, e, 0.0, dt, 0.0,
                                             0.0, 0.0, k1, k2, 0.0)
        expect = (n * k2 * e * dt + k1 * e) / (2 * math.pi)
        assert doppler == pytest.approx(expect)


def test_second_order_gains_bandwidth_identity():
    k1, k2 = second_order_gains(15.0)
    zeta = 1 / math.sqrt(2)
    w0 = math.sqrt(k2)
    assert k1 == pytest.approx(2 * zeta * w0)
    # Bn = w0 (zeta + 1/(4 zeta)) / 2
    assert w0 * (zeta + 1 / (4 * zeta)) / 2 == pytest.approx(15.0)
    assert first_order_gain(5.0) == pytest.approx(20.0)
