"""Per-satellite tracking channel: state machine around the block kernels.

Each channel owns its state vectors, partial-sum bins and bit machinery and
touches nothing shared, so channels can be processed in parallel. Epoch
boundaries follow replica code wraps; bit sync is a histogram of prompt
sign changes over one second, and decoded bits feed the LNAV decoder which
supplies the ephemeris and TOW anchor for pseudorange timestamping.
"""

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cacode import generate_ca_code
from ..constants import (CHIP_RATE_HZ, CODE_CARRIER_RATIO, CODE_LENGTH_CHIPS,
                         EPOCHS_PER_BIT)
from ..nav.frame import LnavDecoder
from ..samples import SampleKind
from . import kernels as K
from .carrier import CarrierMethod, METHOD_ID, float_tables, int_tables
from .loops import first_order_gain, second_order_gains


class ChannelPhase(enum.Enum):
    IDLE = "idle"
    ACQUIRED = "acquired"
    PULL_IN = "pull_in"
    TRACKING = "tracking"
    LOST = "lost"


@dataclass
class TrackingConfig:
    method: CarrierMethod = CarrierMethod.LUT8
    integer_path: bool = True          # int8 arithmetic for LUT methods on IQ input
    spacing_chips: float = 0.5
    dll_bw_hz: float = 2.0
    pll_bw_hz: float = 15.0
    fll_bw_hz: float = 5.0
    pull_in_ms: int = 1000
    fail_limit: int = 3
    cn0_max_dbhz: float = 55.0
    lock_alpha: float = 0.02
    lock_threshold: float = 0.5

    def __post_init__(self):
        if not 0.05 <= self.spacing_chips <= 1.0:
            raise ValueError("correlator spacing must be in [0.05, 1.0] chips")


@dataclass
class EpochObservables:
    ie: float
    qe: float
    ip: float
    qp: float
    il: float
    ql: float
    end_sample: float


def lock_metric(ip: float, qp: float) -> float:
    p = ip * ip + qp * qp
    return (ip * ip - qp * qp) / p if p > 0.0 else 0.0


def estimate_cn0(prompts: np.ndarray, epoch_s: float = 1e-3,
                 cn0_max: float = 55.0) -> float:
    """Narrowband/wideband power-ratio CN0 over 20-epoch groups."""
    prompts = np.asarray(prompts)
    m = EPOCHS_PER_BIT
    n_groups = len(prompts) // m
    if n_groups == 0:
        raise ValueError("need at least 20 prompt epochs")
    mus = []
    for g in range(n_groups):
        seg = prompts[g * m:(g + 1) * m]
        nbp = abs(seg.sum()) ** 2
        wbp = float(np.sum(np.abs(seg) ** 2))
        mus.append(nbp / wbp if wbp > 0 else 1.0)
    mu = float(np.mean(mus))
    if mu >= m - 1e-9:
        return cn0_max
    if mu <= 1.0:
        return 0.0
    return min(cn0_max, 10.0 * math.log10((mu - 1.0) / (m - mu) / epoch_s))


class Channel:
    """One satellite's tracking record and processing engine."""

    def __init__(self, prn: int, fmt, cfg: TrackingConfig = None):
        self.prn = prn
        self.fmt = fmt
        self.cfg = cfg or TrackingConfig()
        self.phase = ChannelPhase.IDLE

        frac = Fraction(self.cfg.spacing_chips).limit_denominator(64)
        self.q_bins = frac.denominator
        off = frac.numerator
        self.bin_off = off
        code = generate_ca_code(prn)
        self.code_p = np.repeat(code, self.q_bins).astype(np.int8)
        self.code_e = np.roll(self.code_p, -off)
        self.code_l = np.roll(self.code_p, off)
        # padded copy for the integer path: index b+off..b+2*off without wrap
        self.code_pad = np.concatenate(
            [self.code_p[-off:], self.code_p, self.code_p[:off]]).astype(np.int8)

        self._use_int = (self.cfg.integer_path
                         and self.cfg.method in (CarrierMethod.LUT16,
                                                 CarrierMethod.LUT8,
                                                 CarrierMethod.LUT2)
                         and fmt.kind is SampleKind.IQ_INTERLEAVED_INT8)
        n_bins = CODE_LENGTH_CHIPS * self.q_bins
        if self._use_int:
            self.bins_i = np.zeros(n_bins, dtype=np.int32)
            self.bins_q = np.zeros(n_bins, dtype=np.int32)
            self.tab_c, self.tab_s = int_tables(self.cfg.method)
        else:
            self.bins_i = np.zeros(n_bins, dtype=np.float32)
            self.bins_q = np.zeros(n_bins, dtype=np.float32)
            if self.cfg.method in (CarrierMethod.FLOAT_SIN, CarrierMethod.TAYLOR2):
                self.tab_c, self.tab_s = float_tables(CarrierMethod.LUT8)
            else:
                self.tab_c, self.tab_s = float_tables(self.cfg.method)
        self.method_id = METHOD_ID[self.cfg.method]

        self.F = np.zeros(K.F_SIZE)
        self.I = np.zeros(K.I_SIZE, dtype=np.int64)
        self.P = self._params()
        max_epochs_per_block = 64
        self._recs = np.zeros((max_epochs_per_block, K.R_SIZE))

        # bit sync / telemetry
        self.decoder = LnavDecoder()
        self.bit_sync_hist = np.zeros(EPOCHS_PER_BIT, dtype=np.int64)
        self.bit_synced = False
        self.bit_edge = 0
        self._first_bit_epoch = None
        self._bit_acc = 0.0
        self._bit_epochs = 0
        self._prev_sign = 0
        self._sync_epochs = 0
        self.bit_count = 0
        self.lock_failure_count = 0

    def _params(self):
        p = np.zeros(K.P_SIZE)
        p[K.P_FS] = self.fmt.sampling_rate
        p[K.P_IF] = self.fmt.intermediate_frequency
        p[K.P_K1_DLL], p[K.P_K2_DLL] = second_order_gains(self.cfg.dll_bw_hz)
        p[K.P_K1_PLL], p[K.P_K2_PLL] = second_order_gains(self.cfg.pll_bw_hz)
        p[K.P_K_FLL] = first_order_gain(self.cfg.fll_bw_hz)
        p[K.P_KAPPA] = CODE_CARRIER_RATIO
        p[K.P_CHIP_RATE] = CHIP_RATE_HZ
        p[K.P_CN0_MAX] = self.cfg.cn0_max_dbhz
        p[K.P_LOCK_ALPHA] = self.cfg.lock_alpha
        p[K.P_LOCK_THRESH] = self.cfg.lock_threshold
        return p

    # ---- state views ----
    @property
    def doppler_hz(self) -> float:
        return float(self.F[K.F_DOPPLER])

    @property
    def code_phase_chips(self) -> float:
        return float(self.I[K.I_CODE_POS]) / 2.0**32 / self.q_bins

    @property
    def cn0_dbhz(self) -> float:
        return float(self.F[K.F_CN0])

    @property
    def carrier_lock_ratio(self) -> float:
        return float(self.F[K.F_LOCK])

    @property
    def epoch_count(self) -> int:
        return int(self.I[K.I_EPOCH])

    @property
    def valid_for_pvt(self) -> bool:
        return (self.phase is ChannelPhase.TRACKING and self.bit_synced
                and self.decoder.ephemeris is not None
                and self.decoder.tow_anchor is not None)

    # ---- lifecycle ----
    def assign(self, acq_result, acq_ref_sample: int, start_sample: int):
        """Seed the NCOs from an acquisition hit; channel starts at start_sample."""
        doppler = acq_result.doppler_hz
        rate = CHIP_RATE_HZ + doppler * CODE_CARRIER_RATIO
        elapsed = (start_sample - acq_ref_sample - acq_result.code_phase_samples)
        chips = (elapsed * rate / self.fmt.sampling_rate) % CODE_LENGTH_CHIPS
        self.F[:] = 0.0
        self.I[:] = 0
        self.F[K.F_CODE_RATE] = rate
        self.F[K.F_DOPPLER] = doppler
        # the loop-filter integrator must start at the acquisition doppler,
        # otherwise the first epoch snaps the NCO back toward zero
        self.F[K.F_PLL_INT] = 2.0 * math.pi * doppler
        self.F[K.F_SPACING] = self.cfg.spacing_chips
        self.F[K.F_FLL_W] = 1.0
        self.F[K.F_PREV_END] = start_sample - self.fmt.sampling_rate * 1e-3
        self.I[K.I_CODE_POS] = np.int64(int(round(chips * self.q_bins * 2.0**32)))
        self.I[K.I_BIN_EPOCH] = self.I[K.I_CODE_POS] >> 32
        self.bins_i[:] = 0
        self.bins_q[:] = 0
        self.phase = ChannelPhase.ACQUIRED
        self.detection_ratio = acq_result.detection_ratio

    def release(self):
        self.phase = ChannelPhase.IDLE

    # ---- block processing ----
    def process_block(self, block) -> np.ndarray:
        """Track one sample block; returns completed epoch records."""
        if self.phase in (ChannelPhase.IDLE, ChannelPhase.LOST):
            return self._recs[:0]
        if self.phase is ChannelPhase.ACQUIRED:
            self.phase = ChannelPhase.PULL_IN

        if self._use_int:
            n = K.TRACK_BLOCK_I8(block.raw, block.sample_offset, self.F, self.I,
                                 self.P, self.method_id, self.q_bins,
                                 self.code_pad, self.bin_off,
                                 self.bins_i, self.bins_q,
                                 self.tab_c, self.tab_s, self._recs)
        else:
            n = K.track_block_f32(block.samples, block.sample_offset, self.F,
                                  self.I, self.P, self.method_id, self.q_bins,
                                  self.code_p, self.code_e, self.code_l,
                                  self.bins_i, self.bins_q,
                                  self.tab_c, self.tab_s, self._recs)
        recs = self._recs[:n]
        self._post_process(recs)
        return recs

    def _post_process(self, recs):
        cfg = self.cfg
        if self.phase is ChannelPhase.PULL_IN:
            done = self.epoch_count
            self.F[K.F_FLL_W] = max(0.0, 1.0 - done / (cfg.pull_in_ms))
            if done >= cfg.pull_in_ms:
                if self.F[K.F_LOCK] > cfg.lock_threshold:
                    self.phase = ChannelPhase.TRACKING
                    self.F[K.F_FLL_W] = 0.0
                    self.I[K.I_TRK_GATE] = 1
                    self.I[K.I_FAILS] = 0
                    self.I[K.I_LOW_STREAK] = 0
                    # CN0 estimated over the pull-in transient does not count
                    self.I[K.I_CN0_LOW] = 0
                    self.I[K.I_CN0_UPD] = 0
                elif done >= 2 * cfg.pull_in_ms:
                    self.phase = ChannelPhase.LOST
                return
        if self.phase is not ChannelPhase.TRACKING:
            return

        for row in recs:
            ip = row[K.R_IP]
            epoch = int(row[K.R_EPOCH])
            sign = 1 if ip >= 0 else -1
            if not self.bit_synced:
                if self._prev_sign != 0 and sign != self._prev_sign:
                    self.bit_sync_hist[epoch % EPOCHS_PER_BIT] += 1
                self._prev_sign = sign
                self._sync_epochs += 1
                if self._sync_epochs >= 1000:
                    if self.bit_sync_hist.max() >= 4:
                        self.bit_synced = True
                        self.bit_edge = int(self.bit_sync_hist.argmax())
                        self._bit_acc = 0.0
                        self._bit_epochs = -1  # arm at next boundary
                        # align CN0 groups to bit edges from here on
                        self.I[K.I_GROUP_OFFSET] = self.bit_edge
                        self.I[K.I_GROUP_N] = 0
                        self.I[K.I_MU_N] = 0
                        self.F[K.F_NB_I] = 0.0
                        self.F[K.F_NB_Q] = 0.0
                        self.F[K.F_WB] = 0.0
                        self.F[K.F_MU_SUM] = 0.0
                    else:
                        self.bit_sync_hist[:] = 0
                        self._sync_epochs = 0
            else:
                if epoch % EPOCHS_PER_BIT == self.bit_edge:
                    if self._bit_epochs == EPOCHS_PER_BIT:
                        self.decoder.push_bit(1 if self._bit_acc > 0 else 0)
                        self.bit_count += 1
                    elif self._bit_epochs == -1:
                        self._first_bit_epoch = epoch
                    self._bit_acc = 0.0
                    self._bit_epochs = 0
                if self._bit_epochs >= 0:
                    self._bit_acc += ip
                    self._bit_epochs += 1

        self.lock_failure_count = int(self.I[K.I_FAILS])
        cn0_valid = self.I[K.I_CN0_UPD] >= 1
        if self.lock_failure_count > cfg.fail_limit or \
                (cn0_valid and self.I[K.I_CN0_LOW] >= 1):
            self.phase = ChannelPhase.LOST

    # ---- measurements ----
    def transmit_time(self):
        """SV time (seconds of week) of the last processed sample, or None."""
        anchor = self.decoder.tow_anchor
        if anchor is None or self._first_bit_epoch is None:
            return None
        anchor_bit, anchor_s = anchor
        e_anchor = self._first_bit_epoch + EPOCHS_PER_BIT * anchor_bit
        periods = (self.epoch_count - e_anchor) + \
            self.code_phase_chips / CODE_LENGTH_CHIPS
        return anchor_s + periods * 1e-3

    def measurement(self):
        if not self.valid_for_pvt:
            return None
        t_tx = self.transmit_time()
        if t_tx is None:
            return None
        return (self.prn, t_tx, self.decoder.ephemeris)


def correlate_epoch(samples, channel: Channel) -> EpochObservables:
    """Correlate exactly one epoch worth of samples for a channel.

    The slice must span one code period at the channel's current code rate;
    a mismatched slice is skipped and counts as a lock failure.
    """
    fs = channel.fmt.sampling_rate
    wrap = (np.int64(CODE_LENGTH_CHIPS) * channel.q_bins) << 32
    cinc = int(round(channel.F[K.F_CODE_RATE] * channel.q_bins / fs * 2.0**32))
    need = int((wrap - channel.I[K.I_CODE_POS] + cinc - 1) // cinc)
    n = len(samples.raw) // 2 if channel._use_int else len(samples.samples)
    if n != need:
        channel.I[K.I_FAILS] += 1
        channel.lock_failure_count = int(channel.I[K.I_FAILS])
        return None
    recs = channel.process_block(samples)
    if len(recs) != 1:
        return None
    r = recs[0]
    return EpochObservables(ie=r[K.R_IE], qe=r[K.R_QE], ip=r[K.R_IP],
                            qp=r[K.R_QP], il=r[K.R_IL], ql=r[K.R_QL],
                            end_sample=r[K.R_END])
