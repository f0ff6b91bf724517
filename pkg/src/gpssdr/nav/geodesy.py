"""ECEF <-> geodetic conversion (WGS-84), for logs and KML only."""

import math

from ..constants import WGS84_A, WGS84_F

_E2 = WGS84_F * (2.0 - WGS84_F)
_B = WGS84_A * (1.0 - WGS84_F)
_EP2 = _E2 / (1.0 - _E2)


def ecef_to_geodetic(x: float, y: float, z: float):
    """Closed-form (Bowring) conversion; error < 1e-9 rad near the surface.

    Returns (lat_rad, lon_rad, height_m).
    """
    lon = math.atan2(y, x)
    p = math.hypot(x, y)
    if p < 1e-9:
        lat = math.copysign(math.pi / 2.0, z)
        return lat, lon, abs(z) - _B
    theta = math.atan2(z * WGS84_A, p * _B)
    st, ct = math.sin(theta), math.cos(theta)
    lat = math.atan2(z + _EP2 * _B * st**3, p - _E2 * WGS84_A * ct**3)
    n = WGS84_A / math.sqrt(1.0 - _E2 * math.sin(lat) ** 2)
    h = p / math.cos(lat) - n
    return lat, lon, h


def geodetic_to_ecef(lat: float, lon: float, h: float):
    n = WGS84_A / math.sqrt(1.0 - _E2 * math.sin(lat) ** 2)
    x = (n + h) * math.cos(lat) * math.cos(lon)
    y = (n + h) * math.cos(lat) * math.sin(lon)
    z = (n * (1.0 - _E2) + h) * math.sin(lat)
    return x, y, z
