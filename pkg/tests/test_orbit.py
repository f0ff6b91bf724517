"""Satellite position against an independent rotation-matrix oracle."""

import math

import numpy as np
import pytest

from gpssdr.constants import EARTH_GM, EARTH_ROTATION_RATE, RELATIVISTIC_F
from gpssdr.nav.ephemeris import Ephemeris
from gpssdr.nav.orbit import sat_position, solve_kepler


def bisect_kepler(m, e):
    lo, hi = m - 1.0, m + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - e * math.sin(mid) < m:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rotation_oracle(eph, t):
    """Position via explicit rotation matrices, solved with bisection."""
    a = eph.sqrt_a ** 2
    tk = t - eph.toe
    n = math.sqrt(EARTH_GM / a ** 3) + eph.delta_n
    m = eph.m0 + n * tk
    ek = bisect_kepler(m, eph.e)
    nu = 2.0 * math.atan2(math.sqrt(1 + eph.e) * math.sin(ek / 2),
                          math.sqrt(1 - eph.e) * math.cos(ek / 2))
    phi = nu + eph.omega
    du = eph.cus * math.sin(2 * phi) + eph.cuc * math.cos(2 * phi)
    dr = eph.crs * math.sin(2 * phi) + eph.crc * math.cos(2 * phi)
    di = eph.cis * math.sin(2 * phi) + eph.cic * math.cos(2 * phi)
    u = phi + du
    r = a * (1 - eph.e * math.cos(ek)) + dr
    inc = eph.i0 + eph.idot * tk + di
    lam = (eph.omega0 + (eph.omega_dot - EARTH_ROTATION_RATE) * tk
           - EARTH_ROTATION_RATE * eph.toe)
    vec = np.array([r, 0.0, 0.0])

    def rz(ang):
        c, s = math.cos(ang), math.sin(ang)
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])

    def rx(ang):
        c, s = math.cos(ang), math.sin(ang)
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])

    return rz(lam) @ rx(inc) @ rz(u) @ vec


def typical_eph(**kw):
    base = dict(sqrt_a=5153.70012, e=0.0112, i0=0.9583, omega0=1.4387,
                omega=-2.2391, m0=0.7193, delta_n=4.5e-9, idot=-5.1e-11,
                omega_dot=-8.1e-9, cuc=2.1e-6, cus=7.6e-6, crc=230.8,
                crs=42.1, cic=7.1e-8, cis=-3.9e-8, toe=172800.0,
                toc=172800.0, af0=2.7e-4, af1=1.1e-11, af2=0.0, tgd=9.3e-9,
                iode=44, iodc=44, week=1024)
    base.update(kw)
    return Ephemeris(**base)


def test_kepler_newton_vs_bisection():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = float(rng.uniform(-math.pi, math.pi))
        e = float(rng.uniform(0.0, 0.03))
        assert solve_kepler(m, e) == pytest.approx(bisect_kepler(m, e), abs=1e-10)


def test_position_matches_rotation_oracle():
    eph = typical_eph()
    for dt in (-1800.0, 0.0, 900.0, 3600.0):
        pos, _ = sat_position(eph, eph.toe + dt)
        ref = rotation_oracle(eph, eph.toe + dt)
        assert np.linalg.norm(pos - ref) < 1e-4


def test_circular_equatorial_radius():
    eph = typical_eph(e=0.0, i0=0.0, delta_n=0.0, idot=0.0,
                      cuc=0, cus=0, crc=0, crs=0, cic=0, cis=0)
    pos, _ = sat_position(eph, eph.toe + 1234.0)
    assert np.linalg.norm(pos) == pytest.approx(eph.sqrt_a ** 2, abs=1e-6)


def test_true_anomaly_from_m0_at_toe():
    eph = typical_eph(delta_n=0.0, cuc=0, cus=0, crc=0, crs=0, cic=0, cis=0)
    ek = solve_kepler(eph.m0, eph.e)
    r_expect = eph.sqrt_a ** 2 * (1 - eph.e * math.cos(ek))
    pos, _ = sat_position(eph, eph.toe)
    assert np.linalg.norm(pos) == pytest.approx(r_expect, abs=1e-6)


def test_clock_polynomial_and_relativity():
    eph = typical_eph()
    t = eph.toc + 100.0
    _, clk = sat_position(eph, t)
    ek = solve_kepler(eph.m0 + (math.sqrt(EARTH_GM / eph.sqrt_a**6)
                                + eph.delta_n) * (t - eph.toe), eph.e)
    expect = (eph.af0 + eph.af1 * 100.0
              + RELATIVISTIC_F * eph.e * eph.sqrt_a * math.sin(ek) - eph.tgd)
    assert clk == pytest.approx(expect, abs=1e-15)


def test_week_wrap():
    eph = typical_eph(toe=1800.0)
    # time just before week end equals time wrapped around
    p1, _ = sat_position(eph, 1800.0 - 10.0)
    p2, _ = sat_position(eph, 604800.0 + 1790.0)
    assert np.linalg.norm(p1 - p2) < 1e-6
