"""Receiver configuration: defaults < key=value file < explicit overrides.

Domains follow the receiver's supported option table; every rejected value
names the field and the allowed set.
"""

from dataclasses import dataclass, field, fields

SAMPLING_RATES_MHZ = (2.0, 4.0, 5.0, 10.0, 20.0, 25.0)
SEARCH_BANDS_KHZ = (10.0, 12.0, 14.0, 16.0, 18.0, 20.0)
COHERENT_MS = (1, 2, 4, 8, 16, 32)
PVT_RATES_HZ = (1.0, 2.0, 5.0, 10.0, 20.0)
PVT_AVG_DEPTHS = (0, 10, 20, 50, 100)
SAMPLE_FORMATS = ("iq_int8", "real_int8")
CARRIER_METHODS = ("float_sin", "taylor2", "lut16", "lut8", "lut2")
ACQ_ENGINES = ("joint", "pcs")
QUEUE_POLICIES = ("drop", "block")


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    # receiver option table
    sampling_rate: float = 5.0          # MHz
    receiver_gain: float = 20.0         # dB, recorded only (no hardware)
    satellites_to_search: tuple = tuple(range(1, 33))
    num_channels: int = 12
    acq_search_band: float = 10.0       # kHz
    acq_coherent_ms: int = 4
    pvt_rate: float = 5.0               # Hz
    pvt_avg_depth: int = 10
    # input/output plumbing
    sample_format: str = "iq_int8"
    intermediate_frequency: float = 0.0  # Hz, real format only
    input_path: str = ""
    scenario_path: str = ""
    output_dir: str = "."
    # engine options
    carrier_method: str = "lut8"
    integer_path: bool = True
    acq_engine: str = "joint"
    acq_threshold: float = 2.0
    correlator_spacing: float = 0.5     # chips
    queue_policy: str = "drop"
    queue_capacity: int = 50            # blocks
    block_ms: float = 20.0
    thread_count: int = 1
    live_pacing: bool = False
    track_log_every: int = 1            # epochs between tracking log rows
    # QoS re-acquisition policy
    qos_min_tracking: int = 4
    qos_drop_fraction: float = 0.30
    qos_drop_window_s: float = 10.0
    qos_min_num_chans: int = 5
    qos_min_cn0: float = 40.0

    @property
    def sampling_rate_hz(self) -> float:
        return self.sampling_rate * 1e6

    @property
    def acq_search_band_hz(self) -> float:
        return self.acq_search_band * 1e3

    def validate(self):
        def check(name, value, allowed):
            if value not in allowed:
                raise ConfigError(f"{name}={value!r} not allowed; choose one of "
                                  f"{sorted(allowed)}")
        check("sampling_rate", self.sampling_rate, SAMPLING_RATES_MHZ)
        if not 0.0 <= self.receiver_gain <= 30.0:
            raise ConfigError(f"receiver_gain={self.receiver_gain} outside 0-30 dB")
        if not self.satellites_to_search or \
                not set(self.satellites_to_search) <= set(range(1, 33)):
            raise ConfigError("satellites_to_search must be a subset of 1..32")
        if not 1 <= self.num_channels <= 12:
            raise ConfigError(f"num_channels={self.num_channels} outside 1-12")
        check("acq_search_band", self.acq_search_band, SEARCH_BANDS_KHZ)
        check("acq_coherent_ms", self.acq_coherent_ms, COHERENT_MS)
        check("pvt_rate", self.pvt_rate, PVT_RATES_HZ)
        check("pvt_avg_depth", self.pvt_avg_depth, PVT_AVG_DEPTHS)
        check("sample_format", self.sample_format, SAMPLE_FORMATS)
        check("carrier_method", self.carrier_method, CARRIER_METHODS)
        check("acq_engine", self.acq_engine, ACQ_ENGINES)
        check("queue_policy", self.queue_policy, QUEUE_POLICIES)
        if self.intermediate_frequency != 0.0 and self.sample_format != "real_int8":
            raise ConfigError("intermediate_frequency requires sample_format=real_int8")
        if self.queue_capacity < 1:
            raise ConfigError("queue_capacity must be >= 1")
        if self.thread_count < 1:
            raise ConfigError("thread_count must be >= 1")
        if self.track_log_every < 1:
            raise ConfigError("track_log_every must be >= 1")
        if not 0.05 <= self.correlator_spacing <= 1.0:
            raise ConfigError("correlator_spacing must be within 0.05-1.0 chips")
        return self

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "satellites_to_search":
                v = ",".join(str(p) for p in v)
            out.append(f"{f.name}={v}")
        return "\n".join(out) + "\n"


_BOOL_FIELDS = {"integer_path", "live_pacing"}
_INT_FIELDS = {"num_channels", "acq_coherent_ms", "pvt_avg_depth",
               "queue_capacity", "thread_count", "track_log_every",
               "qos_min_tracking", "qos_min_num_chans"}
_FLOAT_FIELDS = {"sampling_rate", "receiver_gain", "acq_search_band",
                 "pvt_rate", "intermediate_frequency", "acq_threshold",
                 "correlator_spacing", "block_ms", "qos_drop_fraction",
                 "qos_drop_window_s", "qos_min_cn0"}


def _parse_satellites(text: str):
    prns = set()
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            prns.update(range(int(lo), int(hi) + 1))
        else:
            prns.add(int(part))
    return tuple(sorted(prns))


def _coerce(name: str, raw: str):
    raw = raw.strip()
    if name == "satellites_to_search":
        return _parse_satellites(raw)
    if name in _BOOL_FIELDS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}={raw!r} is not a boolean")
    try:
        if name in _INT_FIELDS:
            return int(raw)
        if name in _FLOAT_FIELDS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}={raw!r} is not a number") from None
    return raw


def parse_config(path=None, overrides=None) -> Config:
    """Layered resolution: defaults < config file < overrides."""
    known = {f.name for f in fields(Config)}
    values = {}

    def apply(name, raw, where):
        if name not in known:
            raise ConfigError(f"unknown config key {name!r} ({where})")
        values[name] = _coerce(name, raw)

    if path:
        with open(path) as f:
            for lineno, line in enumerate(f, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                apply(key.strip(), val, f"{path}:{lineno}")
    for key, val in (overrides or {}).items():
        apply(key, str(val), "override")
    return Config(**values).validate()
