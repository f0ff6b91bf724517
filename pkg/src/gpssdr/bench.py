"""Benchmark harness: acquisition, carrier methods, tracking, pipeline.

Reported statistics are medians over repeated runs with a warmup excluded,
and every report carries a machine descriptor so numbers from different
hosts are never compared silently.
"""

import os
import platform
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .acq import AcqConfig, AcqResult, acquire_joint, acquire_pcs
from .cacode import generate_ca_code
from .config import Config
from .constants import CHIP_RATE_HZ, EPOCHS_PER_BIT
from .pipeline import SimSource, run_session
from .samples import SampleFormat, SampleKind, ingest
from .sim import SatScenario, Scenario, Simulator, simulate_to_array
from .trk.carrier import CarrierMethod
from .trk.channel import Channel, ChannelPhase, TrackingConfig

SUITES = ("acquisition", "carrier", "tracking", "pipeline")


@dataclass
class BenchReport:
    suite: str
    rows: list
    machine: dict
    notes: str = ""

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}"]
        for k, v in self.machine.items():
            lines.append(f"machine.{k}: {v}")
        if self.notes:
            lines.append(f"notes: {self.notes}")
        if self.rows:
            cols = list(self.rows[0].keys())
            widths = {c: max(len(c), *(len(_fmt(r[c])) for r in self.rows))
                      for c in cols}
            lines.append("  ".join(c.ljust(widths[c]) for c in cols))
            for r in self.rows:
                lines.append("  ".join(_fmt(r[c]).ljust(widths[c]) for c in cols))
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def machine_descriptor():
    desc = {
        "cores": os.cpu_count(),
        "platform": platform.platform(),
        "python": platform.python_version(),
    }
    try:
        with open("/proc/cpuinfo") as f:
            for line in f:
                if line.startswith("model name"):
                    desc["cpu"] = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return desc


def time_median(fn, runs: int = 5, warmup: int = 1):
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _twelve_sat_scenario(fmt, duration_s, cn0=45.0, seed=12):
    rng = np.random.default_rng(seed)
    sats = []
    for i, prn in enumerate(range(1, 13)):
        sats.append(SatScenario(
            prn=prn, cn0_dbhz=cn0,
            code_phase_chips=float(rng.uniform(0, 1023)),
            doppler_hz=float(rng.uniform(-4000, 4000)),
            carrier_phase_rad=float(rng.uniform(0, 6.28)),
        ))
    return Scenario(sats=sats, fmt=fmt, duration_s=duration_s, seed=seed)


def bench_acquisition(fs=5e6, band_hz=10e3, coherent_list=(4, 8),
                      n_prns=32, runs=5, seed=3):
    """PCS vs joint engine timing over the full PRN and Doppler zone."""
    fmt = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, fs)
    need_ms = max(coherent_list)
    sc = _twelve_sat_scenario(fmt, need_ms * 1e-3, seed=seed)
    arr, _ = simulate_to_array(sc, block_ms=float(need_ms))
    samples = ingest(arr.tobytes(), fmt).samples
    prns = tuple(range(1, n_prns + 1))
    rows = []
    timing = {}
    for ms in coherent_list:
        n = int(fs * 1e-3) * ms
        x = samples[:n]
        cfg = AcqConfig(coherent_ms=ms, search_band_hz=band_hz, prns=prns)
        t_joint = time_median(lambda: acquire_joint(x, fs, cfg), runs=runs)
        t_pcs = time_median(lambda: acquire_pcs(x, fs, cfg), runs=runs)
        timing[ms] = (t_pcs, t_joint)
        rows.append({"coherent_ms": ms, "engine": "pcs",
                     "median_ms": t_pcs * 1e3, "speedup": 1.0})
        rows.append({"coherent_ms": ms, "engine": "joint",
                     "median_ms": t_joint * 1e3,
                     "speedup": t_pcs / t_joint})
    return BenchReport("acquisition", rows, machine_descriptor(),
                       notes=f"{n_prns} PRNs, {band_hz/1e3:.0f} kHz band, "
                             f"fs={fs/1e6:.0f} MHz, median of {runs}")


def _seed_channel(prn, fmt, truth, method, integer_path, spacing=0.5):
    ch = Channel(prn, fmt, TrackingConfig(method=method,
                                          integer_path=integer_path,
                                          spacing_chips=spacing))
    cp = truth.code_phase_samples(prn, 0, fmt.sampling_rate)
    dop = truth.for_block(0, prn)[0].doppler_hz
    ch.assign(AcqResult(prn, dop, int(round(cp)), 9.0, True), 0, 0)
    return ch


def measure_carrier_performance(duration_s=30.0, fs=2e6, cn0=45.0,
                                methods=None, seed=21, settle_s=4.0,
                                progress=None):
    """Average CN0 and epoch-channel timing per carrier method.

    One noise-controlled 12-channel recording is generated once and tracked
    in full once per method (float arithmetic paths, so only the carrier
    generation differs); the dB loss is the CN0 gap to the float sin()
    reference on the identical signal.
    """
    methods = methods or list(CarrierMethod)
    fmt = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, fs)
    sc = _twelve_sat_scenario(fmt, duration_s, cn0=cn0, seed=seed)
    arr, truth = simulate_to_array(sc)
    spb = int(fs * 0.02)
    n_blocks = len(arr) // (2 * spb)
    blocks = [ingest(arr[2 * b * spb:2 * (b + 1) * spb].tobytes(), fmt,
                     b, b * spb) for b in range(n_blocks)]
    out = {}
    for method in methods:
        chans = [_seed_channel(p, fmt, truth, method, integer_path=False)
                 for p in range(1, 13)]
        cn0_sum = 0.0
        cn0_n = 0
        epochs = 0
        t0 = time.perf_counter()
        for b, blk in enumerate(blocks):
            for ch in chans:
                recs = ch.process_block(blk)
                epochs += len(recs)
            if (b + 1) * 0.02 > settle_s:
                for ch in chans:
                    if ch.cn0_dbhz > 0:  # has an estimate
                        cn0_sum += ch.cn0_dbhz
                        cn0_n += 1
        wall = time.perf_counter() - t0
        out[method] = {
            "cn0_dbhz": cn0_sum / cn0_n if cn0_n else 0.0,
            "ns_per_epoch_channel": wall / max(epochs, 1) * 1e9,
            "tracking": sum(ch.phase is ChannelPhase.TRACKING for ch in chans),
        }
        if progress is not None:
            progress(method.value, out[method])
    base = out[CarrierMethod.FLOAT_SIN]["cn0_dbhz"]
    for method in methods:
        out[method]["loss_db"] = base - out[method]["cn0_dbhz"]
    return out


def bench_carrier(duration_s=30.0, fs=2e6, seed=21):
    perf = measure_carrier_performance(duration_s=duration_s, fs=fs, seed=seed)
    rows = []
    for method in CarrierMethod:
        p = perf[method]
        ns = p["ns_per_epoch_channel"]
        rows.append({"method": method.value,
                     "loss_db": p["loss_db"],
                     "ns_per_epoch_channel": ns,
                     "realtime_channels": 1e6 / ns if ns else 0.0})
    return BenchReport("carrier", rows, machine_descriptor(),
                       notes=f"{duration_s:.0f} s, 12 channels, fs={fs/1e6:.0f} MHz, "
                             "loss relative to float_sin")


def measure_tracking_throughput(fs=5e6, n_seconds=2.0, runs=5, seed=2):
    """ns per epoch-channel for each correlator feature level."""
    fmt = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, fs)
    sc = Scenario(sats=[SatScenario(prn=7, cn0_dbhz=None, doppler_hz=1500.0)],
                  fmt=fmt, duration_s=n_seconds, seed=seed)
    arr, truth = simulate_to_array(sc)
    spb = int(fs * 0.02)
    blocks = [ingest(arr[2 * b * spb:2 * (b + 1) * spb].tobytes(), fmt,
                     b, b * spb) for b in range(len(arr) // (2 * spb))]
    levels = [("float_sin", CarrierMethod.FLOAT_SIN, False),
              ("taylor2", CarrierMethod.TAYLOR2, False),
              ("lut16", CarrierMethod.LUT16, False),
              ("lut8", CarrierMethod.LUT8, False),
              ("lut2", CarrierMethod.LUT2, False),
              ("lut8_int8_simd", CarrierMethod.LUT8, True)]
    results = {}
    for name, method, int_path in levels:
        def once():
            ch = _seed_channel(7, fmt, truth, method, integer_path=int_path)
            total = 0
            for blk in blocks:
                total += len(ch.process_block(blk))
            return total
        epochs = once()  # warmup and epoch count
        t = time_median(once, runs=runs, warmup=0)
        results[name] = t / max(epochs, 1) * 1e9
    return results


def bench_tracking(fs=5e6, n_seconds=2.0, runs=5):
    res = measure_tracking_throughput(fs=fs, n_seconds=n_seconds, runs=runs)
    rows = []
    for name, ns in res.items():
        rows.append({"feature_level": name, "ns_per_epoch_channel": ns,
                     "realtime_channels": 1e6 / ns})
    return BenchReport("tracking", rows, machine_descriptor(),
                       notes=f"fs={fs/1e6:.0f} MHz, 1 ms epochs; realtime "
                             "channels = 1 ms / epoch-channel time")


def bench_pipeline(duration_s=10.0, fs=2e6, seed=5):
    """Overflow statistics under paced load, nominal and forced-slow."""
    rows = []
    for label, delay in (("paced", 0.0), ("forced_slow_consumer", 0.04)):
        fmt = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, fs)
        sc = _twelve_sat_scenario(fmt, duration_s, seed=seed)
        cfg = Config(sampling_rate=fs / 1e6, output_dir=_bench_dir(),
                     queue_policy="drop", live_pacing=True,
                     track_log_every=20, num_channels=12)
        src = SimSource(sc, block_ms=cfg.block_ms)
        m = run_session(src, cfg, consumer_delay_s=delay)
        rows.append({
            "mode": label,
            "overflows": m.overflow_count,
            "ov_per_sec": m.avg_overflows_per_sec,
            "sec_between_ov": (m.avg_time_between_overflows_s
                               if m.avg_time_between_overflows_s is not None
                               else float("nan")),
            "delivered": m.delivered_blocks,
            "produced": m.produced_blocks,
        })
    return BenchReport("pipeline", rows, machine_descriptor(),
                       notes=f"live-paced {duration_s:.0f} s, 12 channels, "
                             f"fs={fs/1e6:.0f} MHz")


def _bench_dir():
    import tempfile
    d = os.path.join(tempfile.gettempdir(), "gpssdr-bench")
    os.makedirs(d, exist_ok=True)
    return d


def run_suite(name: str, **kwargs) -> BenchReport:
    if name == "acquisition":
        return bench_acquisition(**kwargs)
    if name == "carrier":
        return bench_carrier(**kwargs)
    if name == "tracking":
        return bench_tracking(**kwargs)
    if name == "pipeline":
        return bench_pipeline(**kwargs)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
