"""Satellite position and clock from broadcast ephemeris."""

import math

import numpy as np

from ..constants import (EARTH_GM, EARTH_ROTATION_RATE, GPS_WEEK_SECONDS,
                         RELATIVISTIC_F)

_KEPLER_TOL = 1e-12
_KEPLER_MAX_ITERS = 20


def _wrap_week(dt: float) -> float:
    if dt > GPS_WEEK_SECONDS / 2:
        dt -= GPS_WEEK_SECONDS
    elif dt < -GPS_WEEK_SECONDS / 2:
        dt += GPS_WEEK_SECONDS
    return dt


def solve_kepler(m: float, e: float) -> float:
    """Eccentric anomaly from mean anomaly by Newton iteration."""
    ek = m if e < 0.8 else math.pi
    for _ in range(_KEPLER_MAX_ITERS):
        delta = (ek - e * math.sin(ek) - m) / (1.0 - e * math.cos(ek))
        ek -= delta
        if abs(delta) < _KEPLER_TOL:
            break
    return ek


def sat_position(eph, t: float):
    """ECEF position (m) and SV clock correction (s) at GPS time-of-week t.

    Clock correction includes the relativistic term and subtracts TGD for
    single-frequency L1 use.
    """
    a = eph.sqrt_a * eph.sqrt_a
    tk = _wrap_week(t - eph.toe)
    n = math.sqrt(EARTH_GM / a**3) + eph.delta_n
    m = eph.m0 + n * tk
    ek = solve_kepler(m, eph.e)

    sin_ek = math.sin(ek)
    cos_ek = math.cos(ek)
    nu = math.atan2(math.sqrt(1.0 - eph.e**2) * sin_ek, cos_ek - eph.e)
    phi = nu + eph.omega
    sin2p = math.sin(2.0 * phi)
    cos2p = math.cos(2.0 * phi)

    du = eph.cus * sin2p + eph.cuc * cos2p
    dr = eph.crs * sin2p + eph.crc * cos2p
    di = eph.cis * sin2p + eph.cic * cos2p

    u = phi + du
    r = a * (1.0 - eph.e * cos_ek) + dr
    i = eph.i0 + eph.idot * tk + di
    omega = (eph.omega0 + (eph.omega_dot - EARTH_ROTATION_RATE) * tk
             - EARTH_ROTATION_RATE * eph.toe)

    xp = r * math.cos(u)
    yp = r * math.sin(u)
    cos_o = math.cos(omega)
    sin_o = math.sin(omega)
    cos_i = math.cos(i)
    pos = np.array([
        xp * cos_o - yp * cos_i * sin_o,
        xp * sin_o + yp * cos_i * cos_o,
        yp * math.sin(i),
    ])

    dt_clk = _wrap_week(t - eph.toc)
    clock = (eph.af0 + eph.af1 * dt_clk + eph.af2 * dt_clk * dt_clk
             + RELATIVISTIC_F * eph.e * eph.sqrt_a * sin_ek - eph.tgd)
    return pos, clock
