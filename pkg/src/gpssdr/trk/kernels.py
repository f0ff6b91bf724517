"""Compiled per-block tracking engine.

The per-sample loop only wipes the carrier and adds the result into a
sub-chip partial-sum bin (code position comes from an integer NCO with 2^32
units per bin), so it contains no code gathers and no early/late work.
Early/prompt/late sums fall out at each epoch close as three contiguous dot
products of the bin array against pre-rolled code tables. Integer input runs
entirely in integer arithmetic with >=32-bit accumulation.
"""

import math

import numpy as np
from numba import njit

from . import native
from .loops import dll_discriminator, fll_discriminator, pll_discriminator, loop_update

TWO_PI = 2.0 * math.pi
MASK32 = 0xFFFFFFFF

# ---- float64 state vector ----
F_CODE_RATE = 0     # commanded code rate, chips/s
F_DOPPLER = 1       # commanded carrier doppler, Hz
F_PLL_INT = 2       # rad/s
F_DLL_INT = 3       # chips/s
F_FLL_W = 4         # FLL assist weight, 1 -> 0
F_IP_PREV = 5
F_QP_PREV = 6
F_PREV_END = 7      # global sample index of previous epoch end
F_CN0 = 8           # dB-Hz (updated once per second)
F_LOCK = 9          # smoothed carrier lock metric
F_NB_I = 10
F_NB_Q = 11
F_WB = 12
F_MU_SUM = 13
F_CARR_PH = 14      # carrier phase, cycles (float methods)
F_SPACING = 15      # chips
F_SIZE = 16

# ---- int64 state vector ----
I_CODE_POS = 0      # bins << 32
I_CARR_ACC = 1      # 32-bit accumulator (LUT methods)
I_EPOCH = 2
I_GROUP_N = 3
I_MU_N = 4
I_LOW_STREAK = 5
I_FAILS = 6
I_CN0_LOW = 7
I_CN0_UPD = 8
I_ACC_EPOCH = 9     # carrier accumulator at current epoch start (int path)
I_BIN_EPOCH = 10    # bin index at current epoch start (int path)
I_TRK_GATE = 11     # 1 once TRACKING: arms the lock-loss streak counter
I_GROUP_OFFSET = 12  # epoch%20 of bit edges: aligns CN0 groups after bit sync
I_SIZE = 13

# ---- parameter vector ----
P_FS = 0
P_IF = 1
P_K1_DLL = 2
P_K2_DLL = 3
P_K1_PLL = 4
P_K2_PLL = 5
P_K_FLL = 6
P_KAPPA = 7
P_CHIP_RATE = 8
P_CN0_MAX = 9
P_LOCK_ALPHA = 10
P_LOCK_THRESH = 11
P_SIZE = 12

# record row layout
R_END = 0
R_IE, R_QE, R_IP, R_QP, R_IL, R_QL = 1, 2, 3, 4, 5, 6
R_DOPPLER = 7
R_CODE_RATE = 8
R_CN0 = 9
R_LOCK = 10
R_EPOCH = 11
R_CODE_PHASE = 12   # replica chips remaining past the wrap (sub-sample)
R_SIZE = 13

METHOD_FLOAT_SIN = 0
METHOD_TAYLOR2 = 1
METHOD_LUT16 = 2
METHOD_LUT8 = 3
METHOD_LUT2 = 4


# Consecutive samples usually land in the same sub-chip bin; accumulating
# the run in registers and storing once per bin change keeps the loop free
# of read-modify-write dependency chains on the bin array.

@njit(cache=True, nogil=True)
def _seg_float_sin(sig, i0, n, ph, fcyc, pos, cinc, bins_i, bins_q):
    if n <= 0:
        return ph, pos
    cur = pos >> 32
    ai = 0.0
    aq = 0.0
    for k in range(n):
        x = sig[i0 + k]
        ph -= math.floor(ph)
        th = TWO_PI * ph
        c = math.cos(th)
        s = math.sin(th)
        b = pos >> 32
        if b != cur:
            bins_i[cur] += ai
            bins_q[cur] += aq
            ai = 0.0
            aq = 0.0
            cur = b
        ai += x.real * c + x.imag * s
        aq += x.imag * c - x.real * s
        ph += fcyc
        pos += cinc
    bins_i[cur] += ai
    bins_q[cur] += aq
    return ph, pos


@njit(cache=True, nogil=True)
def _seg_taylor2(sig, i0, n, ph, fcyc, pos, cinc, bins_i, bins_q):
    if n <= 0:
        return ph, pos
    cur = pos >> 32
    ai = 0.0
    aq = 0.0
    for k in range(n):
        x = sig[i0 + k]
        phq = ph - math.floor(ph)
        t = 4.0 * phq
        kk = int(t + 0.5)
        r = (t - kk) * (math.pi / 2.0)
        sr = r - r * r * r / 6.0
        cr = 1.0 - r * r / 2.0
        kk &= 3
        if kk == 0:
            c = cr
            s = sr
        elif kk == 1:
            c = -sr
            s = cr
        elif kk == 2:
            c = -cr
            s = -sr
        else:
            c = sr
            s = -cr
        b = pos >> 32
        if b != cur:
            bins_i[cur] += ai
            bins_q[cur] += aq
            ai = 0.0
            aq = 0.0
            cur = b
        ai += x.real * c + x.imag * s
        aq += x.imag * c - x.real * s
        ph += fcyc
        pos += cinc
    bins_i[cur] += ai
    bins_q[cur] += aq
    return ph, pos


@njit(cache=True, nogil=True)
def _seg_lut_f32(sig, i0, n, acc, inc, pos, cinc, bins_i, bins_q, tab_c, tab_s):
    if n <= 0:
        return acc, pos
    cur = pos >> 32
    ai = 0.0
    aq = 0.0
    for k in range(n):
        x = sig[i0 + k]
        idx = (acc >> 26) & 63
        c = tab_c[idx]
        s = tab_s[idx]
        b = pos >> 32
        if b != cur:
            bins_i[cur] += ai
            bins_q[cur] += aq
            ai = 0.0
            aq = 0.0
            cur = b
        ai += x.real * c + x.imag * s
        aq += x.imag * c - x.real * s
        acc = (acc + inc) & MASK32
        pos += cinc
    bins_i[cur] += ai
    bins_q[cur] += aq
    return acc, pos


@njit(cache=True, nogil=True)
def _seg_raw_i8(raw, i0, n, pos, cinc, bins_i, bins_q):
    # Integer path sample loop: pure code-aligned boxcar integration of the
    # raw I/Q bytes. The carrier rotates less than a degree per sub-chip
    # bin, so it is applied per bin at epoch close instead of per sample.
    if n <= 0:
        return pos
    cur = pos >> 32
    ai = 0
    aq = 0
    for k in range(n):
        j = 2 * (i0 + k)
        i = np.int32(raw[j])
        q = np.int32(raw[j + 1])
        b = pos >> 32
        if b != cur:
            bins_i[cur] += ai
            bins_q[cur] += aq
            ai = 0
            aq = 0
            cur = b
        ai += i
        aq += q
        pos += cinc
    bins_i[cur] += ai
    bins_q[cur] += aq
    return pos


@njit(cache=True, nogil=True)
def _close_epoch_f64(bins_i, bins_q, code_p, code_e, code_l):
    ie = 0.0
    qe = 0.0
    ip = 0.0
    qp = 0.0
    il = 0.0
    ql = 0.0
    for b in range(bins_i.shape[0]):
        bi = np.float64(bins_i[b])
        bq = np.float64(bins_q[b])
        cp = code_p[b]
        ce = code_e[b]
        cl = code_l[b]
        ip += bi * cp
        qp += bq * cp
        ie += bi * ce
        qe += bq * ce
        il += bi * cl
        ql += bq * cl
        bins_i[b] = 0
        bins_q[b] = 0
    return ie, qe, ip, qp, il, ql


@njit(cache=True, nogil=True)
def _run_dot6(bins_i, bins_q, code_pad, off, b0, b1):
    # 4-wide unrolled raw-bin x code reduction; int32 accumulation is safe
    # (|bin| <= samples_per_bin * 127 and one code period per epoch).
    rip = np.int32(0)
    rqp = np.int32(0)
    rie = np.int32(0)
    rqe = np.int32(0)
    ril = np.int32(0)
    rql = np.int32(0)
    off2 = 2 * off
    k = b0
    while k + 4 <= b1:
        x0 = bins_i[k]
        y0 = bins_q[k]
        c0 = np.int32(code_pad[k + off])
        e0 = np.int32(code_pad[k + off2])
        l0 = np.int32(code_pad[k])
        x1 = bins_i[k + 1]
        y1 = bins_q[k + 1]
        c1 = np.int32(code_pad[k + 1 + off])
        e1 = np.int32(code_pad[k + 1 + off2])
        l1 = np.int32(code_pad[k + 1])
        x2 = bins_i[k + 2]
        y2 = bins_q[k + 2]
        c2 = np.int32(code_pad[k + 2 + off])
        e2 = np.int32(code_pad[k + 2 + off2])
        l2 = np.int32(code_pad[k + 2])
        x3 = bins_i[k + 3]
        y3 = bins_q[k + 3]
        c3 = np.int32(code_pad[k + 3 + off])
        e3 = np.int32(code_pad[k + 3 + off2])
        l3 = np.int32(code_pad[k + 3])
        rip += x0 * c0 + x1 * c1 + x2 * c2 + x3 * c3
        rqp += y0 * c0 + y1 * c1 + y2 * c2 + y3 * c3
        rie += x0 * e0 + x1 * e1 + x2 * e2 + x3 * e3
        rqe += y0 * e0 + y1 * e1 + y2 * e2 + y3 * e3
        ril += x0 * l0 + x1 * l1 + x2 * l2 + x3 * l3
        rql += y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
        k += 4
    while k < b1:
        x = bins_i[k]
        y = bins_q[k]
        cp = np.int32(code_pad[k + off])
        ce = np.int32(code_pad[k + off2])
        cl = np.int32(code_pad[k])
        rip += x * cp
        rqp += y * cp
        rie += x * ce
        rqe += y * ce
        ril += x * cl
        rql += y * cl
        k += 1
    return rip, rqp, rie, rqe, ril, rql


@njit(cache=True, nogil=True)
def _close_epoch_i8(bins_i, bins_q, code_pad, off, acc0, acc_step, tab_c, tab_s):
    """Fused carrier rotation + E/P/L dot products over the raw bins.

    The carrier LUT index is constant over runs of bins; raw code products
    are reduced per run and rotated once per run, which equals per-bin
    rotation exactly (integer distributivity). Run sums fit int32; epoch
    sums accumulate in int64, far beyond the 32-bit overflow floor for
    25 MHz epochs.
    """
    ie = 0
    qe = 0
    ip = 0
    qp = 0
    il = 0
    ql = 0
    nb = bins_i.shape[0]
    acc = acc0 & MASK32
    step = acc_step & MASK32
    b = 0
    while b < nb:
        idx = (acc >> 26) & 63
        c = np.int64(tab_c[idx])
        s = np.int64(tab_s[idx])
        if step > 0:
            next_acc = ((acc >> 26) + 1) << 26
            run = (next_acc - acc + step - 1) // step
        else:
            run = nb - b
        if run > nb - b:
            run = nb - b
        rip, rqp, rie, rqe, ril, rql = _run_dot6(bins_i, bins_q, code_pad,
                                                 off, b, b + run)
        ip += np.int64(rip) * c + np.int64(rqp) * s
        qp += np.int64(rqp) * c - np.int64(rip) * s
        ie += np.int64(rie) * c + np.int64(rqe) * s
        qe += np.int64(rqe) * c - np.int64(rie) * s
        il += np.int64(ril) * c + np.int64(rql) * s
        ql += np.int64(rql) * c - np.int64(ril) * s
        b += run
        acc += run * step
    bins_i[:] = 0
    bins_q[:] = 0
    return float(ie), float(qe), float(ip), float(qp), float(il), float(ql)


@njit(cache=True, nogil=True)
def _epoch_update(F, I, P, recs, nrec, gend, code_phase_chips,
                  ie, qe, ip, qp, il, ql):
    """Discriminators, loop filter, lock/CN0 detectors, record row."""
    fs = P[P_FS]
    dt = (gend - F[F_PREV_END]) / fs
    if dt <= 0.0:
        dt = 1e-3
    e_dll = dll_discriminator(ie, qe, il, ql, F[F_SPACING])
    e_pll = pll_discriminator(ip, qp)
    if I[I_EPOCH] > 0:
        # half-plane fold makes the cross/dot discriminator insensitive to
        # data-bit sign flips between epochs
        cross = F[F_IP_PREV] * qp - F[F_QP_PREV] * ip
        dot = F[F_IP_PREV] * ip + F[F_QP_PREV] * qp
        if dot < 0.0:
            cross = -cross
            dot = -dot
        if cross == 0.0 and dot == 0.0:
            e_fll = 0.0
        else:
            e_fll = math.atan2(cross, dot) / (TWO_PI * dt)
    else:
        e_fll = 0.0
    ok = math.isfinite(e_dll) and math.isfinite(e_pll) and math.isfinite(e_fll)
    if ok:
        doppler, code_corr, pll_int, dll_int = loop_update(
            F[F_DOPPLER], 0.0, F[F_PLL_INT], F[F_DLL_INT],
            e_dll, e_pll, e_fll, dt, F[F_FLL_W],
            P[P_K1_DLL], P[P_K2_DLL], P[P_K1_PLL], P[P_K2_PLL], P[P_K_FLL])
        F[F_DOPPLER] = doppler
        F[F_PLL_INT] = pll_int
        F[F_DLL_INT] = dll_int
        F[F_CODE_RATE] = P[P_CHIP_RATE] + doppler * P[P_KAPPA] + code_corr
    else:
        I[I_FAILS] += 1

    # carrier lock metric: smoothed (IP^2-QP^2)/(IP^2+QP^2); the loss-of-lock
    # streak only counts once the channel has reached TRACKING
    p2 = ip * ip + qp * qp
    inst = (ip * ip - qp * qp) / p2 if p2 > 0.0 else 0.0
    a = P[P_LOCK_ALPHA]
    F[F_LOCK] += a * (inst - F[F_LOCK])
    if I[I_TRK_GATE] != 0:
        if F[F_LOCK] < P[P_LOCK_THRESH]:
            I[I_LOW_STREAK] += 1
            if I[I_LOW_STREAK] >= 50:
                I[I_FAILS] += 1
                I[I_LOW_STREAK] = 0
        else:
            I[I_LOW_STREAK] = 0

    # narrowband/wideband CN0 over 20-epoch groups (bit-edge aligned once
    # bit sync sets the group offset), reported once per second
    F[F_NB_I] += ip
    F[F_NB_Q] += qp
    F[F_WB] += p2
    I[I_GROUP_N] += 1
    epoch_now = I[I_EPOCH]
    if (epoch_now + 1 - I[I_GROUP_OFFSET]) % 20 == 0:
        if I[I_GROUP_N] == 20:
            if F[F_WB] > 0.0:
                nbp = F[F_NB_I] * F[F_NB_I] + F[F_NB_Q] * F[F_NB_Q]
                F[F_MU_SUM] += nbp / F[F_WB]
            else:
                F[F_MU_SUM] += 1.0
            I[I_MU_N] += 1
        F[F_NB_I] = 0.0
        F[F_NB_Q] = 0.0
        F[F_WB] = 0.0
        I[I_GROUP_N] = 0
        if I[I_MU_N] == 50:
            mu = F[F_MU_SUM] / 50.0
            if mu >= 20.0 - 1e-9:
                cn0 = P[P_CN0_MAX]
            elif mu <= 1.0:
                cn0 = 0.0
            else:
                cn0 = 10.0 * math.log10(1000.0 * (mu - 1.0) / (20.0 - mu))
                if cn0 > P[P_CN0_MAX]:
                    cn0 = P[P_CN0_MAX]
                if cn0 < 0.0:
                    cn0 = 0.0
            F[F_CN0] = cn0
            I[I_CN0_UPD] += 1
            if cn0 < 25.0:
                I[I_CN0_LOW] += 1
            else:
                I[I_CN0_LOW] = 0
            F[F_MU_SUM] = 0.0
            I[I_MU_N] = 0

    recs[nrec, R_END] = gend
    recs[nrec, R_IE] = ie
    recs[nrec, R_QE] = qe
    recs[nrec, R_IP] = ip
    recs[nrec, R_QP] = qp
    recs[nrec, R_IL] = il
    recs[nrec, R_QL] = ql
    recs[nrec, R_DOPPLER] = F[F_DOPPLER]
    recs[nrec, R_CODE_RATE] = F[F_CODE_RATE]
    recs[nrec, R_CN0] = F[F_CN0]
    recs[nrec, R_LOCK] = F[F_LOCK]
    recs[nrec, R_EPOCH] = I[I_EPOCH]
    recs[nrec, R_CODE_PHASE] = code_phase_chips

    F[F_IP_PREV] = ip
    F[F_QP_PREV] = qp
    F[F_PREV_END] = gend
    I[I_EPOCH] += 1


@njit(cache=True, nogil=True)
def track_block_f32(sig, block_start, F, I, P, method, q_bins,
                    code_p, code_e, code_l, bins_i, bins_q,
                    tab_c, tab_s, recs):
    """Run tracking over one block of complex64 samples. Returns epoch count."""
    fs = P[P_FS]
    n = sig.shape[0]
    wrap = (np.int64(1023) * q_bins) << 32
    pos = I[I_CODE_POS]
    acc = I[I_CARR_ACC]
    ph = F[F_CARR_PH]
    nrec = 0
    i = 0
    while i < n:
        cinc = np.int64(round(F[F_CODE_RATE] * q_bins / fs * 4294967296.0))
        if cinc < 1:
            cinc = 1
        freq = P[P_IF] + F[F_DOPPLER]
        rem = wrap - pos
        nseg = (rem + cinc - 1) // cinc
        seg = nseg if nseg < n - i else n - i
        if method == METHOD_FLOAT_SIN:
            ph, pos = _seg_float_sin(sig, i, seg, ph, freq / fs, pos, cinc, bins_i, bins_q)
        elif method == METHOD_TAYLOR2:
            ph, pos = _seg_taylor2(sig, i, seg, ph, freq / fs, pos, cinc, bins_i, bins_q)
        else:
            inc = np.int64(round(freq / fs * 4294967296.0)) & MASK32
            acc, pos = _seg_lut_f32(sig, i, seg, acc, inc, pos, cinc, bins_i, bins_q, tab_c, tab_s)
            ph += seg * (freq / fs)
        i += seg
        if pos >= wrap:
            pos -= wrap
            ie, qe, ip, qp, il, ql = _close_epoch_f64(bins_i, bins_q, code_p, code_e, code_l)
            cp_chips = np.float64(pos) / 4294967296.0 / q_bins
            _epoch_update(F, I, P, recs, nrec, np.float64(block_start + i), cp_chips, ie, qe, ip, qp, il, ql)
            nrec += 1
    I[I_CODE_POS] = pos
    I[I_CARR_ACC] = acc
    F[F_CARR_PH] = ph
    return nrec


def make_track_block_i8_native(bin_raw_c, close_c):
    """Build the int8 block driver around the compiled C hot loops.

    ctypes callees are not cacheable by numba, hence cache=False here; the
    signature matches track_block_i8 exactly.
    """

    @njit(cache=False, nogil=True)
    def track_block_i8_native(raw, block_start, F, I, P, method, q_bins,
                              code_pad, bin_off, bins_i, bins_q,
                              tab_c, tab_s, recs):
        fs = P[P_FS]
        n = raw.shape[0] // 2
        wrap = (np.int64(1023) * q_bins) << 32
        pos = I[I_CODE_POS]
        acc = I[I_CARR_ACC]
        out6 = np.empty(6, dtype=np.float64)
        nrec = 0
        i = 0
        while i < n:
            cinc = np.int64(round(F[F_CODE_RATE] * q_bins / fs * 4294967296.0))
            if cinc < 1:
                cinc = 1
            freq = P[P_IF] + F[F_DOPPLER]
            inc_s = np.int64(round(freq / fs * 4294967296.0))
            inc = inc_s & MASK32
            rem = wrap - pos
            nseg = (rem + cinc - 1) // cinc
            seg = nseg if nseg < n - i else n - i
            pos = bin_raw_c(raw.ctypes.data, i, seg, pos, cinc,
                            bins_i.ctypes.data, bins_q.ctypes.data)
            acc = (acc + seg * inc) & MASK32
            i += seg
            if pos >= wrap:
                pos -= wrap
                # per-bin phase step must be scaled from the signed
                # increment; scaling the masked value breaks mod arithmetic
                acc_step = np.int64(round(inc_s * 4294967296.0 / cinc)) & MASK32
                acc0 = I[I_ACC_EPOCH] - I[I_BIN_EPOCH] * acc_step
                close_c(bins_i.ctypes.data, bins_q.ctypes.data,
                        bins_i.shape[0], code_pad.ctypes.data, bin_off,
                        acc0, acc_step, tab_c.ctypes.data, tab_s.ctypes.data,
                        out6.ctypes.data)
                cp_chips = np.float64(pos) / 4294967296.0 / q_bins
                _epoch_update(F, I, P, recs, nrec, np.float64(block_start + i),
                              cp_chips, out6[0], out6[1], out6[2], out6[3], out6[4], out6[5])
                nrec += 1
                I[I_ACC_EPOCH] = acc
                I[I_BIN_EPOCH] = pos >> 32
        I[I_CODE_POS] = pos
        I[I_CARR_ACC] = acc
        return nrec

    return track_block_i8_native


@njit(cache=True, nogil=True)
def track_block_i8(raw, block_start, F, I, P, method, q_bins,
                   code_pad, bin_off, bins_i, bins_q,
                   tab_c, tab_s, recs):
    """Integer-arithmetic tracking over one block of IQ-interleaved int8."""
    fs = P[P_FS]
    n = raw.shape[0] // 2
    wrap = (np.int64(1023) * q_bins) << 32
    pos = I[I_CODE_POS]
    acc = I[I_CARR_ACC]
    nrec = 0
    i = 0
    while i < n:
        cinc = np.int64(round(F[F_CODE_RATE] * q_bins / fs * 4294967296.0))
        if cinc < 1:
            cinc = 1
        freq = P[P_IF] + F[F_DOPPLER]
        inc_s = np.int64(round(freq / fs * 4294967296.0))
        inc = inc_s & MASK32
        rem = wrap - pos
        nseg = (rem + cinc - 1) // cinc
        seg = nseg if nseg < n - i else n - i
        pos = _seg_raw_i8(raw, i, seg, pos, cinc, bins_i, bins_q)
        acc = (acc + seg * inc) & MASK32
        i += seg
        if pos >= wrap:
            pos -= wrap
            # per-bin phase step must be scaled from the signed increment;
            # scaling the masked value breaks mod arithmetic
            acc_step = np.int64(round(inc_s * 4294967296.0 / cinc)) & MASK32
            acc0 = I[I_ACC_EPOCH] - I[I_BIN_EPOCH] * acc_step
            ie, qe, ip, qp, il, ql = _close_epoch_i8(
                bins_i, bins_q, code_pad, bin_off, acc0, acc_step, tab_c, tab_s)
            cp_chips = np.float64(pos) / 4294967296.0 / q_bins
            _epoch_update(F, I, P, recs, nrec, np.float64(block_start + i), cp_chips, ie, qe, ip, qp, il, ql)
            nrec += 1
            I[I_ACC_EPOCH] = acc
            I[I_BIN_EPOCH] = pos >> 32
    I[I_CODE_POS] = pos
    I[I_CARR_ACC] = acc
    return nrec


_NATIVE = native.load()
TRACK_BLOCK_I8 = (make_track_block_i8_native(*_NATIVE) if _NATIVE is not None
                  else track_block_i8)
