"""Synthetic GPS L1 baseband generation with exact ground truth.

Each satellite is described by the offset between its code/carrier timeline
and receiver time, delta(t) = t_sv(t) - t. Code phase, carrier phase and
navigation bit index all derive from delta, which keeps code and carrier
dynamics coherent by construction. Within one block delta is linearized
(curvature over 20 ms is far below a micro-chip) and per-block boundary
values are exact, so no drift accumulates.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..cacode import generate_ca_code
from ..constants import (CHIP_RATE_HZ, CODE_LENGTH_CHIPS, EPOCHS_PER_BIT,
                         L1_CARRIER_HZ, SPEED_OF_LIGHT)
from ..nav.orbit import sat_position
from ..samples import SampleKind
from .lnav_encode import encode_lnav

_WRAP = np.int64(CODE_LENGTH_CHIPS) << 32
_NOISE_TARGET_COUNTS = 12.0


@njit(cache=True, nogil=True)
def _render_iq(out_i, out_q, code, bits, pos, inc, period, amp,
               z_re, z_im, dz_re, dz_im):
    n = out_i.shape[0]
    bit = amp * bits[period // EPOCHS_PER_BIT]
    for k in range(n):
        s = bit * code[pos >> 32]
        out_i[k] += s * z_re
        out_q[k] += s * z_im
        t = z_re * dz_re - z_im * dz_im
        z_im = z_re * dz_im + z_im * dz_re
        z_re = t
        pos += inc
        if pos >= _WRAP:
            pos -= _WRAP
            period += 1
            bit = amp * bits[period // EPOCHS_PER_BIT]
    return pos, period


@njit(cache=True, nogil=True)
def _render_real(out_i, code, bits, pos, inc, period, amp,
                 z_re, z_im, dz_re, dz_im):
    n = out_i.shape[0]
    bit = amp * bits[period // EPOCHS_PER_BIT]
    for k in range(n):
        out_i[k] += bit * code[pos >> 32] * z_re
        t = z_re * dz_re - z_im * dz_im
        z_im = z_re * dz_im + z_im * dz_re
        z_re = t
        pos += inc
        if pos >= _WRAP:
            pos -= _WRAP
            period += 1
            bit = amp * bits[period // EPOCHS_PER_BIT]
    return pos, period


def _doppler_integral_fn(knots):
    """fd(t) and its exact integral from t=0 for a piecewise-linear profile."""
    ts = np.array([t for t, _ in knots], dtype=np.float64)
    fd = np.array([f for _, f in knots], dtype=np.float64)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (fd[1:] + fd[:-1]) * np.diff(ts))])

    def eval_raw(t):
        # flat extension outside the knot span, integral measured from ts[0]
        if t <= ts[0]:
            return fd[0], fd[0] * (t - ts[0])
        if t >= ts[-1]:
            return fd[-1], cum[-1] + fd[-1] * (t - ts[-1])
        i = int(np.searchsorted(ts, t, side="right")) - 1
        f = fd[i] + (fd[i + 1] - fd[i]) * (t - ts[i]) / (ts[i + 1] - ts[i])
        return f, cum[i] + 0.5 * (fd[i] + f) * (t - ts[i])

    _, integ0 = eval_raw(0.0)

    def fn(t):
        f, integ = eval_raw(t)
        return f, integ - integ0

    return fn


class _AnalyticProfile:
    def __init__(self, sat):
        self.sat = sat
        self._fd = _doppler_integral_fn(sat.doppler_knots())
        chips0 = sat.start_periods * CODE_LENGTH_CHIPS + sat.code_phase_chips
        self.delta0 = chips0 / CHIP_RATE_HZ
        self.phase0_cycles = sat.carrier_phase_rad / (2.0 * math.pi)

    def delta(self, t):
        _, integ = self._fd(t)
        return self.delta0 + integ / L1_CARRIER_HZ

    def doppler(self, t):
        fd, _ = self._fd(t)
        return fd

    def carrier_cycles(self, t):
        _, integ = self._fd(t)
        return self.phase0_cycles + integ


class _GeometricProfile:
    """delta(t) from ephemeris geometry against a static receiver."""

    def __init__(self, sat, receiver_ecef, gps_time_start):
        self.sat = sat
        self.rx = np.asarray(receiver_ecef, dtype=np.float64)
        self.t0 = gps_time_start
        self.anchor = sat.tow_start_units * 6.0

    def delta(self, t):
        # receiver time in seconds of week; solve the light-time equation
        tw = self.t0 + t
        tau = 0.07
        clk = 0.0
        for _ in range(3):
            pos, clk = sat_position(self.sat.ephemeris, tw - tau)
            tau = np.linalg.norm(pos - self.rx) / SPEED_OF_LIGHT
        # t_sv - t, with the bit/code anchor folded in via the week timeline
        return (self.t0 - self.anchor) + (clk - tau)

    def doppler(self, t, dt=0.02):
        return L1_CARRIER_HZ * (self.delta(t + dt) - self.delta(t - dt)) / (2 * dt)

    def carrier_cycles(self, t):
        return L1_CARRIER_HZ * self.delta(t)


@dataclass
class GroundTruthRecord:
    block_index: int
    prn: int
    code_phase_chips: float   # received code phase at block start
    doppler_hz: float
    bit_index: int


class GroundTruth:
    def __init__(self):
        self.records = []
        self.bits = {}       # prn -> +/-1 int8 array
        self.amplitudes = {}
        self.noise_sigma = 0.0
        self.scale = 1.0
        self.clipped = 0
        self.total_samples = 0

    def for_block(self, block_index, prn=None):
        out = [r for r in self.records if r.block_index == block_index
               and (prn is None or r.prn == prn)]
        return out

    def code_phase_samples(self, prn, block_index, sampling_rate):
        """Offset of the next code-period start, in samples from block start."""
        rec = self.for_block(block_index, prn)[0]
        rate = CHIP_RATE_HZ * (1.0 + rec.doppler_hz / L1_CARRIER_HZ)
        chips_left = (-rec.code_phase_chips) % CODE_LENGTH_CHIPS
        return chips_left / rate * sampling_rate

    def write_log(self, path):
        with open(path, "w") as f:
            f.write("block_index,prn,code_phase_chips,doppler_hz,bit_index\n")
            for r in self.records:
                f.write(f"{r.block_index},{r.prn},{r.code_phase_chips:.6f},"
                        f"{r.doppler_hz:.3f},{r.bit_index}\n")


class Simulator:
    """Streams one scenario as int8 blocks; single-use per instance."""

    def __init__(self, scenario, block_ms: float = 20.0):
        scenario.validate()
        self.scenario = scenario
        self.fmt = scenario.fmt
        self.fs = scenario.fmt.sampling_rate
        self.block_ms = block_ms
        self.samples_per_block = int(round(self.fs * block_ms * 1e-3))
        self.n_blocks = int(round(scenario.duration_s * 1000.0 / block_ms))
        self.truth = GroundTruth()
        self._rng = np.random.Generator(np.random.Philox(scenario.seed))

        cn0s = [s.cn0_dbhz for s in scenario.sats]
        noisy = cn0s[0] is not None
        if noisy:
            ref = max(cn0s)
            self.noise_sigma = math.sqrt(self.fs / (2.0 * 10 ** (ref / 10.0)))
            amps = {s.prn: 10 ** ((s.cn0_dbhz - ref) / 20.0) for s in scenario.sats}
            self.scale = _NOISE_TARGET_COUNTS / self.noise_sigma
        else:
            self.noise_sigma = 0.0
            amps = {s.prn: 1.0 for s in scenario.sats}
            self.scale = min(40.0, 120.0 / sum(amps.values()))
        self.truth.noise_sigma = self.noise_sigma
        self.truth.scale = self.scale
        self.truth.amplitudes = amps

        self._sats = []
        for s in scenario.sats:
            if scenario.receiver_ecef is not None:
                profile = _GeometricProfile(s, scenario.receiver_ecef,
                                            scenario.gps_time_start)
            else:
                profile = _AnalyticProfile(s)
            total_periods = (int(math.ceil((scenario.duration_s + 0.2) * 1000.0))
                             + s.start_periods
                             + int(abs(profile.delta(0.0)) * 1000.0) + 40)
            n_bits = total_periods // EPOCHS_PER_BIT + 4
            if s.nav_bits == "lnav":
                n_sf = n_bits // 300 + 2
                raw = encode_lnav(s.ephemeris, s.tow_start_units, n_sf)
                bits = np.where(raw[:n_bits] > 0, 1, -1).astype(np.int8)
            else:
                seed = s.bit_seed if s.bit_seed is not None else 1000 + s.prn
                brng = np.random.Generator(np.random.Philox(seed))
                bits = np.where(brng.integers(0, 2, size=n_bits) > 0, 1, -1).astype(np.int8)
            self.truth.bits[s.prn] = bits
            code = generate_ca_code(s.prn)
            self._sats.append((s, profile, code, bits, amps[s.prn]))

    def _block_edges(self, bi):
        t0 = bi * self.block_ms * 1e-3
        t1 = t0 + self.samples_per_block / self.fs
        return t0, t1

    def blocks(self):
        """Yield raw int8 bytes per block, recording ground truth."""
        n = self.samples_per_block
        is_iq = self.fmt.kind is SampleKind.IQ_INTERLEAVED_INT8
        fif = self.fmt.intermediate_frequency
        buf_i = np.empty(n, dtype=np.float64)
        buf_q = np.empty(n, dtype=np.float64)
        for bi in range(self.n_blocks):
            t0, t1 = self._block_edges(bi)
            buf_i[:] = 0.0
            buf_q[:] = 0.0
            for sat, profile, code, bits, amp in self._sats:
                d0 = profile.delta(t0)
                d1 = profile.delta(t1)
                chips_g0 = (t0 + d0) * CHIP_RATE_HZ
                chips_g1 = (t1 + d1) * CHIP_RATE_HZ
                period = int(chips_g0 // CODE_LENGTH_CHIPS)
                cp = chips_g0 - period * CODE_LENGTH_CHIPS
                pos = np.int64(int(round(cp * 2.0**32)))
                if pos >= _WRAP:
                    pos -= _WRAP
                    period += 1
                inc = np.int64(int(round((chips_g1 - chips_g0) / n * 2.0**32)))
                ph = profile.carrier_cycles(t0) + fif * t0
                fcyc = ((profile.carrier_cycles(t1) - profile.carrier_cycles(t0))
                        / n + fif / self.fs)
                ph -= math.floor(ph)
                z_re = math.cos(2 * math.pi * ph)
                z_im = math.sin(2 * math.pi * ph)
                dz_re = math.cos(2 * math.pi * fcyc)
                dz_im = math.sin(2 * math.pi * fcyc)
                if is_iq:
                    _render_iq(buf_i, buf_q, code, bits, pos, inc, period, amp,
                               z_re, z_im, dz_re, dz_im)
                else:
                    _render_real(buf_i, code, bits, pos, inc, period, amp,
                                 z_re, z_im, dz_re, dz_im)
                self.truth.records.append(GroundTruthRecord(
                    block_index=bi, prn=sat.prn,
                    code_phase_chips=cp,
                    doppler_hz=(chips_g1 - chips_g0) / (t1 - t0) / CHIP_RATE_HZ
                    * L1_CARRIER_HZ - L1_CARRIER_HZ,
                    bit_index=period // EPOCHS_PER_BIT))
            yield self._finish_block(buf_i, buf_q, is_iq, n)

    def _finish_block(self, buf_i, buf_q, is_iq, n):
        if is_iq:
            out = np.empty(2 * n, dtype=np.float64)
            out[0::2] = buf_i
            out[1::2] = buf_q
            if self.noise_sigma > 0.0:
                out += self._rng.standard_normal(2 * n) * self.noise_sigma
        else:
            out = buf_i.copy()
            if self.noise_sigma > 0.0:
                out += self._rng.standard_normal(n) * self.noise_sigma
        out *= self.scale
        np.rint(out, out=out)
        self.truth.clipped += int(np.count_nonzero(np.abs(out) > 127))
        self.truth.total_samples += n
        np.clip(out, -127, 127, out=out)
        return out.astype(np.int8).tobytes()


def simulate_to_file(scenario, path, gt_path=None, block_ms: float = 20.0):
    sim = Simulator(scenario, block_ms=block_ms)
    with open(path, "wb") as f:
        for raw in sim.blocks():
            f.write(raw)
    if gt_path is not None:
        sim.truth.write_log(gt_path)
    return sim.truth


def simulate_to_array(scenario, block_ms: float = 20.0):
    sim = Simulator(scenario, block_ms=block_ms)
    chunks = [np.frombuffer(raw, dtype=np.int8) for raw in sim.blocks()]
    return np.concatenate(chunks), sim.truth
