"""Scenario description for the synthetic GPS L1 baseband generator."""

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from ..nav.ephemeris import Ephemeris
from ..samples import SampleFormat, SampleKind

MAX_SATELLITES = 12
MAX_DOPPLER_HZ = 10e3
CN0_RANGE = (20.0, 55.0)

DopplerProfile = Union[float, Sequence]  # constant Hz or [(t_s, hz), ...] knots


@dataclass
class SatScenario:
    prn: int
    cn0_dbhz: Optional[float] = 45.0     # None disables noise for the scenario
    code_phase_chips: float = 0.0
    start_periods: int = 0               # code periods elapsed before stream start
    doppler_hz: DopplerProfile = 0.0
    carrier_phase_rad: float = 0.0
    nav_bits: str = "random"             # "random" | "lnav"
    bit_seed: Optional[int] = None
    ephemeris: Optional[Ephemeris] = None
    tow_start_units: int = 0

    def doppler_knots(self):
        if isinstance(self.doppler_hz, (int, float)):
            return [(0.0, float(self.doppler_hz))]
        return [(float(t), float(f)) for t, f in self.doppler_hz]

    def validate(self):
        if not 1 <= self.prn <= 32:
            raise ValueError(f"prn {self.prn} out of range")
        for _, f in self.doppler_knots():
            if abs(f) > MAX_DOPPLER_HZ:
                raise ValueError(f"doppler {f} Hz exceeds +/-10 kHz")
        if self.cn0_dbhz is not None and not CN0_RANGE[0] <= self.cn0_dbhz <= CN0_RANGE[1]:
            raise ValueError(f"cn0 {self.cn0_dbhz} outside {CN0_RANGE}")
        if self.nav_bits == "lnav" and self.ephemeris is None:
            raise ValueError("lnav bits require an ephemeris")
        if self.nav_bits not in ("random", "lnav"):
            raise ValueError(f"unknown nav_bits source {self.nav_bits!r}")


@dataclass
class Scenario:
    sats: list
    fmt: SampleFormat
    duration_s: float
    seed: int = 0
    receiver_ecef: Optional[tuple] = None   # geometric mode when set
    gps_time_start: float = 0.0             # seconds of week at stream start

    def validate(self):
        if len(self.sats) == 0:
            raise ValueError("scenario needs at least one satellite")
        if len(self.sats) > MAX_SATELLITES:
            raise ValueError(f"at most {MAX_SATELLITES} satellites, got {len(self.sats)}")
        prns = [s.prn for s in self.sats]
        if len(set(prns)) != len(prns):
            raise ValueError("duplicate PRNs in scenario")
        for s in self.sats:
            s.validate()
            if self.receiver_ecef is not None and s.ephemeris is None:
                raise ValueError("geometric scenarios require ephemerides")
        cn0s = [s.cn0_dbhz for s in self.sats]
        if any(c is None for c in cn0s) and not all(c is None for c in cn0s):
            raise ValueError("mix of noise-free and noisy satellites is ambiguous")
        if self.duration_s <= 0:
            raise ValueError("duration must be positive")


def _eph_from_dict(d):
    return Ephemeris(**d).quantize()


def load_scenario(path) -> Scenario:
    """Load a scenario from its JSON file form."""
    with open(path) as f:
        doc = json.load(f)
    fmt = SampleFormat(
        kind=SampleKind(doc.get("format", "iq_int8")),
        sampling_rate=float(doc["sampling_rate"]),
        intermediate_frequency=float(doc.get("intermediate_frequency", 0.0)),
    )
    sats = []
    for sd in doc["sats"]:
        eph = _eph_from_dict(sd["ephemeris"]) if "ephemeris" in sd else None
        sats.append(SatScenario(
            prn=int(sd["prn"]),
            cn0_dbhz=sd.get("cn0_dbhz", 45.0),
            code_phase_chips=float(sd.get("code_phase_chips", 0.0)),
            start_periods=int(sd.get("start_periods", 0)),
            doppler_hz=sd.get("doppler_hz", 0.0),
            carrier_phase_rad=float(sd.get("carrier_phase_rad", 0.0)),
            nav_bits=sd.get("nav_bits", "random"),
            bit_seed=sd.get("bit_seed"),
            ephemeris=eph,
            tow_start_units=int(sd.get("tow_start_units", 0)),
        ))
    sc = Scenario(
        sats=sats, fmt=fmt,
        duration_s=float(doc["duration_s"]),
        seed=int(doc.get("seed", 0)),
        receiver_ecef=tuple(doc["receiver_ecef"]) if "receiver_ecef" in doc else None,
        gps_time_start=float(doc.get("gps_time_start", 0.0)),
    )
    sc.validate()
    return sc
