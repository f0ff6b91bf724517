"""The producer/consumer receiver session.

A high-priority producer thread paces sample blocks into a bounded FIFO;
the consumer loop runs acquisition (on a snapshot buffer, only when the QoS
policy demands it), tracks every active channel, solves PVT at the
configured rate and fans records out to monitoring topics whose slow
consumers can never back-pressure the main loop. Offline BLOCK-policy runs
are deterministic: all scheduling is driven by stream time, never by the
wall clock.
"""

import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..acq import (AcqConfig, QosPolicy, acquire_joint, acquire_pcs,
                   qos_should_reacquire, wipe_if)
from ..constants import SPEED_OF_LIGHT
from ..nav.pvt import (NOMINAL_FLIGHT_TIME_S, PvtAverager,
                       InsufficientSatellitesError, GeometryError,
                       PvtDivergedError, form_pseudoranges, solve_pvt_from_obs)
from ..samples import SampleKind
from ..trk.carrier import CarrierMethod
from ..trk.channel import ChannelPhase, TrackingConfig
from .channels import ChannelTable, manage_channels
from .metrics import SessionMetrics, StageTimer
from .queues import BoundedQueue, QueuePolicy
from .sinks import SessionSinks

TOPICS = ("tracking_display", "channel_health", "navigation")


class Fanout:
    """Per-topic bounded queues; a slow sink drops only its own records."""

    def __init__(self, capacity: int = 256):
        self.queues = {}
        self.capacity = capacity

    def attach(self, topic: str) -> BoundedQueue:
        if topic not in TOPICS:
            raise ValueError(f"unknown topic {topic!r}; choose from {TOPICS}")
        q = BoundedQueue(self.capacity, QueuePolicy.DROP_OLDEST)
        self.queues[topic] = q
        return q

    def publish(self, topic: str, record):
        q = self.queues.get(topic)
        if q is not None:
            q.push(record)

    def close(self):
        for q in self.queues.values():
            q.close()


class _Producer(threading.Thread):
    def __init__(self, source, queue, live_pacing, block_s, stop_event):
        super().__init__(name="gpssdr-producer", daemon=True)
        self.source = source
        self.queue = queue
        self.live_pacing = live_pacing
        self.block_s = block_s
        self.stop_event = stop_event
        self.produced = 0
        self.error = None

    def run(self):
        try:
            deadline = time.perf_counter()
            for block in self.source.blocks():
                if self.stop_event.is_set():
                    break
                if self.live_pacing:
                    deadline += self.block_s
                    delay = deadline - time.perf_counter()
                    if delay > 0:
                        time.sleep(delay)
                self.produced += 1
                self.queue.push(block)
        except Exception as exc:  # source failure -> clean finalize downstream
            self.error = exc
        finally:
            self.queue.close()


class _AcqManager:
    """Snapshot-buffer acquisition with QoS-triggered re-arming."""

    def __init__(self, cfg, fmt, run_engine):
        self.cfg = cfg
        self.fmt = fmt
        self.run_engine = run_engine
        self.samples_per_code = int(round(fmt.sampling_rate * 1e-3))
        self.n_needed = self.samples_per_code * cfg.coherent_ms
        self.armed = True
        self._buf = []
        self._buf_n = 0
        self._ref_sample = None

    def feed(self, block):
        """Returns (results, ref_sample) when a search completed, else None."""
        if not self.armed:
            return None
        if self._ref_sample is None:
            self._ref_sample = block.sample_offset
            self._buf = []
            self._buf_n = 0
        self._buf.append(block)
        self._buf_n += len(block)
        if self._buf_n < self.n_needed:
            return None
        x = np.concatenate([b.samples for b in self._buf])[:self.n_needed]
        if self.fmt.kind is SampleKind.REAL_INT8_WITH_IF:
            x = wipe_if(x, self.fmt.intermediate_frequency,
                        self.fmt.sampling_rate, start_index=self._ref_sample)
        ref = self._ref_sample
        self.armed = False
        self._ref_sample = None
        self._buf = []
        results = self.run_engine(x)
        return results, ref

    def rearm(self):
        self.armed = True
        self._ref_sample = None


def run_session(source, config, fanout=None, stop_event=None,
                sinks=None, consumer_delay_s: float = 0.0) -> SessionMetrics:
    """Run the full receiver over a block source; returns session metrics.

    consumer_delay_s artificially slows the consumer loop (benchmark knob
    for overflow-robustness measurements).
    """
    config.validate()
    fmt = source.fmt
    fs = fmt.sampling_rate
    stop_event = stop_event or threading.Event()
    fanout = fanout or Fanout()
    metrics = SessionMetrics()
    for name in ("tracking", "acquisition", "pvt", "logging"):
        metrics.stages[name] = StageTimer()
    if sinks is None:
        sinks = SessionSinks(config.output_dir, fs,
                             track_log_every=config.track_log_every)

    trk_cfg = TrackingConfig(
        method=CarrierMethod(config.carrier_method),
        integer_path=config.integer_path,
        spacing_chips=config.correlator_spacing,
    )
    table = ChannelTable(fmt, trk_cfg, num_channels=config.num_channels)
    acq_cfg = AcqConfig(coherent_ms=config.acq_coherent_ms,
                        search_band_hz=config.acq_search_band_hz,
                        threshold=config.acq_threshold,
                        prns=tuple(config.satellites_to_search))
    engine = acquire_joint if config.acq_engine == "joint" else acquire_pcs

    def run_engine(x):
        live = set(table.active_prns())
        prns = tuple(p for p in config.satellites_to_search if p not in live)
        if not prns:
            return []
        cfg = AcqConfig(coherent_ms=acq_cfg.coherent_ms,
                        search_band_hz=acq_cfg.search_band_hz,
                        threshold=acq_cfg.threshold, prns=prns)
        return engine(x, fs, cfg)

    acq = _AcqManager(acq_cfg, fmt, run_engine)
    qos_policy = QosPolicy(min_tracking=config.qos_min_tracking,
                           drop_fraction=config.qos_drop_fraction,
                           drop_window_s=config.qos_drop_window_s,
                           min_num_chans=config.qos_min_num_chans,
                           min_cn0_dbhz=config.qos_min_cn0)

    policy = QueuePolicy.BLOCK if config.queue_policy == "block" else \
        QueuePolicy.DROP_NEWEST
    queue = BoundedQueue(config.queue_capacity, policy)
    block_s = source.samples_per_block / fs
    producer = _Producer(source, queue, config.live_pacing, block_s, stop_event)

    averager = PvtAverager(config.pvt_avg_depth)
    pvt_every = max(1, int(round(1.0 / config.pvt_rate / block_s)))
    qos_every = max(1, int(round(1.0 / block_s)))
    drop_history = deque()  # (stream_time, freed_count)
    initial_acquired = 0
    rx_anchor = None  # (sample_index, rx_time_seconds_of_week)

    pool = ThreadPoolExecutor(max_workers=config.thread_count) \
        if config.thread_count > 1 else None

    def process_channels(block):
        chans = table.active()
        if pool is not None and len(chans) > 1:
            results = list(pool.map(lambda c: c.process_block(block), chans))
        else:
            results = [ch.process_block(block) for ch in chans]
        return chans, results

    t_start = time.perf_counter()
    health_every = qos_every
    try:
        producer.start()
        while True:
            block = queue.pop(timeout=0.5)
            if block is None:
                if not producer.is_alive() and len(queue) == 0:
                    break
                continue
            metrics.delivered_blocks += 1
            if consumer_delay_s > 0.0:
                time.sleep(consumer_delay_s)
            end_sample = block.sample_offset + len(block)

            t0 = time.perf_counter()
            hit = acq.feed(block)
            if hit is not None:
                results, ref = hit
                sinks.acquisition.write_results(block.block_index, results)
                fresh = manage_channels(results, table, ref, end_sample)
                if initial_acquired == 0:
                    initial_acquired = len(fresh)
                for r in results:
                    fanout.publish("channel_health",
                                   {"kind": "acquisition", "prn": r.prn,
                                    "doppler_hz": r.doppler_hz,
                                    "code_phase": r.code_phase_samples,
                                    "ratio": min(r.detection_ratio, 1e12),
                                    "detected": r.detected})
            metrics.stages["acquisition"].add(time.perf_counter() - t0)

            t0 = time.perf_counter()
            chans, results = process_channels(block)
            metrics.stages["tracking"].add(time.perf_counter() - t0)

            t0 = time.perf_counter()
            for ch, recs in zip(chans, results):
                if len(recs):
                    sinks.tracking.write_rows(ch.prn, ch.phase.value, recs)
                    fanout.publish("tracking_display",
                                   {"prn": ch.prn,
                                    "time": recs[-1][0] / fs,
                                    "doppler_hz": ch.doppler_hz,
                                    "ip": float(recs[-1][3]),
                                    "qp": float(recs[-1][4])})
            freed = table.release_lost()
            if freed:
                drop_history.append((end_sample / fs, len(freed)))
            metrics.stages["logging"].add(time.perf_counter() - t0)

            # QoS check on stream time, once per second
            if block.block_index % qos_every == 0 and not acq.armed:
                now_s = end_sample / fs
                while drop_history and now_s - drop_history[0][0] > config.qos_drop_window_s:
                    drop_history.popleft()
                dropped = sum(n for _, n in drop_history)
                cn0s = [ch.cn0_dbhz for ch in table.active()
                        if ch.phase is ChannelPhase.TRACKING]
                go, _reason = qos_should_reacquire(
                    table.tracking_count(), initial_acquired, dropped,
                    cn0s, qos_policy)
                if go:
                    acq.rearm()

            if block.block_index % health_every == 0:
                for ch in table.active():
                    fanout.publish("channel_health",
                                   {"kind": "health", "prn": ch.prn,
                                    "cn0_dbhz": ch.cn0_dbhz,
                                    "lock_ratio": ch.carrier_lock_ratio,
                                    "lock_failure_count": ch.lock_failure_count,
                                    "state": ch.phase.value,
                                    "valid_for_pvt": ch.valid_for_pvt})

            # PVT at the configured rate, latched at block boundaries
            if (block.block_index + 1) % pvt_every == 0:
                t0 = time.perf_counter()
                meas = [m for m in (ch.measurement() for ch in table.active())
                        if m is not None]
                if len(meas) >= 4:
                    if rx_anchor is None:
                        rx_anchor = (end_sample,
                                     min(t for _, t, _ in meas)
                                     + NOMINAL_FLIGHT_TIME_S)
                    rx_time = rx_anchor[1] + (end_sample - rx_anchor[0]) / fs
                    obs = form_pseudoranges(meas, rx_time)
                    try:
                        sol = solve_pvt_from_obs(obs, timestamp=rx_time)
                        sol = averager.update(sol)
                        sinks.add_solution(sol)
                        metrics.pvt_count += 1
                        fanout.publish("navigation",
                                       {"time": sol.timestamp, "x": sol.x,
                                        "y": sol.y, "z": sol.z,
                                        "gdop": sol.gdop,
                                        "nsats": sol.n_sats_used,
                                        "rms_m": sol.rms_error})
                    except (InsufficientSatellitesError, GeometryError,
                            PvtDivergedError):
                        pass
                metrics.stages["pvt"].add(time.perf_counter() - t0)

            metrics.stream_time_s = end_sample / fs
    finally:
        stop_event.set()
        queue.close()
        producer.join(timeout=5.0)
        if pool is not None:
            pool.shutdown(wait=True)
        metrics.produced_blocks = producer.produced
        metrics.overflow_count = queue.overflow_count
        metrics.dropped_blocks = queue.overflow_count
        metrics.run_time_s = time.perf_counter() - t_start
        metrics.channels_tracking = table.tracking_count()
        if producer.error is not None:
            metrics.status = "source_error"
            metrics.error = str(producer.error)
        sinks.finalize(metrics)
        fanout.close()
    return metrics
