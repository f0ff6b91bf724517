"""Broadcast ephemeris record and LNAV subframe 1-3 decoding."""

from dataclasses import dataclass, fields, replace

from .lnav import LNAV_FIELDS, extract_field, field_scale

_SQRT_A_NOMINAL = 5153.6  # sqrt(26560 km) in sqrt(m)


class ConsistencyError(ValueError):
    """IODE/IODC disagreement across subframes."""


class FieldRangeError(ValueError):
    """Decoded field outside its physical range."""


@dataclass
class Ephemeris:
    """Keplerian broadcast orbit plus clock, in SI units (angles in rad)."""

    sqrt_a: float = 5153.6
    e: float = 0.01
    i0: float = 0.96
    omega0: float = 0.0
    omega: float = 0.0
    m0: float = 0.0
    delta_n: float = 0.0
    idot: float = 0.0
    omega_dot: float = 0.0
    cuc: float = 0.0
    cus: float = 0.0
    crc: float = 0.0
    crs: float = 0.0
    cic: float = 0.0
    cis: float = 0.0
    toe: float = 0.0
    toc: float = 0.0
    af0: float = 0.0
    af1: float = 0.0
    af2: float = 0.0
    tgd: float = 0.0
    iode: int = 0
    iodc: int = 0
    week: int = 0
    health: int = 0
    ura: int = 0
    l2_code: int = 1

    def quantize(self) -> "Ephemeris":
        """Snap every broadcast field onto its LNAV scale grid."""
        values = {}
        for name, _, segments, signed, pow2, semi in LNAV_FIELDS:
            attr = "iode" if name == "iode_sf3" else name
            scale = field_scale(pow2, semi)
            raw = round(getattr(self, attr) / scale)
            values[attr] = raw * scale if not _is_int_field(attr) else int(raw)
        return replace(self, **values)


_INT_FIELDS = {"iode", "iodc", "week", "health", "ura", "l2_code"}


def _is_int_field(name: str) -> bool:
    return name in _INT_FIELDS


def decode_ephemeris(payloads: dict) -> Ephemeris:
    """Decode subframe 1-3 source payloads (240-bit ints keyed 1, 2, 3)."""
    for sf in (1, 2, 3):
        if sf not in payloads:
            raise ValueError(f"missing subframe {sf}")
    out = {}
    for name, sf, segments, signed, pow2, semi in LNAV_FIELDS:
        raw = extract_field(int(payloads[sf]), segments, signed)
        scale = field_scale(pow2, semi)
        attr = "iode" if name == "iode_sf3" else name
        value = int(raw) if _is_int_field(attr) and scale == 1.0 else raw * scale
        if name == "iode_sf3":
            out["iode_sf3"] = int(raw)
        else:
            out[attr] = value
    iode_sf3 = out.pop("iode_sf3")
    eph = Ephemeris(**out)
    if eph.iode != iode_sf3 or eph.iode != (eph.iodc & 0xFF):
        raise ConsistencyError(
            f"IODE mismatch: sf2={eph.iode} sf3={iode_sf3} iodc={eph.iodc}")
    if not 0.0 <= eph.e <= 0.03:
        raise FieldRangeError(f"eccentricity {eph.e} outside [0, 0.03]")
    if abs(eph.sqrt_a - _SQRT_A_NOMINAL) > 0.05 * _SQRT_A_NOMINAL:
        raise FieldRangeError(f"sqrt_a {eph.sqrt_a} not within 5% of GPS orbit")
    return eph
