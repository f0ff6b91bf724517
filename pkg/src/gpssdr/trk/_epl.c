/* Integer-path correlator hot loops.
 *
 * bin_raw_i8: code-aligned boxcar integration of raw IQ int8 into sub-chip
 * bins (2^32 NCO units per bin); run-accumulated in registers.
 *
 * close_epoch_i8: fused carrier rotation + early/prompt/late dot products
 * over the bins. The carrier LUT index is constant over bin runs; raw code
 * products reduce per run and rotate once per run (exactly equal to per-bin
 * rotation by integer distributivity). int32 run sums, int64 epoch sums.
 */
#include <stdint.h>

int64_t gpssdr_bin_raw_i8(const int8_t* raw, int64_t i0, int64_t n,
                          int64_t pos, int64_t cinc,
                          int32_t* bins_i, int32_t* bins_q) {
    if (n <= 0) return pos;
    int64_t cur = pos >> 32;
    int32_t ai = 0, aq = 0;
    const int8_t* p = raw + 2 * i0;
    for (int64_t k = 0; k < n; k++) {
        int32_t i = p[2 * k];
        int32_t q = p[2 * k + 1];
        int64_t b = pos >> 32;
        if (b != cur) {
            bins_i[cur] += ai;
            bins_q[cur] += aq;
            ai = 0;
            aq = 0;
            cur = b;
        }
        ai += i;
        aq += q;
        pos += cinc;
    }
    bins_i[cur] += ai;
    bins_q[cur] += aq;
    return pos;
}

void gpssdr_close_epoch_i8(int32_t* bins_i, int32_t* bins_q, int64_t nb,
                           const int8_t* code_pad, int64_t off,
                           int64_t acc0, int64_t step_in,
                           const int8_t* tab_c, const int8_t* tab_s,
                           double* out6) {
    int64_t ie = 0, qe = 0, ip = 0, qp = 0, il = 0, ql = 0;
    uint64_t acc = (uint64_t)acc0 & 0xFFFFFFFFu;
    uint64_t step = (uint64_t)step_in & 0xFFFFFFFFu;
    int64_t b = 0;
    while (b < nb) {
        int64_t idx = (acc >> 26) & 63;
        int64_t c = tab_c[idx], s = tab_s[idx];
        int64_t run;
        if (step > 0) {
            uint64_t next_acc = ((acc >> 26) + 1) << 26;
            run = (int64_t)((next_acc - acc + step - 1) / step);
        } else {
            run = nb - b;
        }
        if (run > nb - b) run = nb - b;
        int32_t rip = 0, rqp = 0, rie = 0, rqe = 0, ril = 0, rql = 0;
        const int32_t* bi = bins_i + b;
        const int32_t* bq = bins_q + b;
        const int8_t* cl = code_pad + b;
        const int8_t* cp = code_pad + b + off;
        const int8_t* ce = code_pad + b + 2 * off;
        for (int64_t k = 0; k < run; k++) {
            int32_t x = bi[k], y = bq[k];
            rip += x * cp[k];
            rqp += y * cp[k];
            rie += x * ce[k];
            rqe += y * ce[k];
            ril += x * cl[k];
            rql += y * cl[k];
        }
        ip += rip * c + rqp * s;
        qp += rqp * c - rip * s;
        ie += rie * c + rqe * s;
        qe += rqe * c - rie * s;
        il += ril * c + rql * s;
        ql += rql * c - ril * s;
        b += run;
        acc += (uint64_t)run * step;
    }
    for (int64_t k = 0; k < nb; k++) {
        bins_i[k] = 0;
        bins_q[k] = 0;
    }
    out6[0] = (double)ie;
    out6[1] = (double)qe;
    out6[2] = (double)ip;
    out6[3] = (double)qp;
    out6[4] = (double)il;
    out6[5] = (double)ql;
}
