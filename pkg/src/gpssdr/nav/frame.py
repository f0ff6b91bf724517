"""Frame synchronization and streaming LNAV decoding."""

import numpy as np

from .ephemeris import ConsistencyError, FieldRangeError, decode_ephemeris
from .lnav import (HOW_SUBFRAME_ID, HOW_TOW, PREAMBLE_BITS, SUBFRAME_BITS,
                   extract_field)
from .parity import check_parity

_PREAMBLE = np.array(PREAMBLE_BITS, dtype=np.uint8)


def _word_at(bits, start):
    w = 0
    for b in bits[start:start + 30]:
        w = (w << 1) | int(b)
    return w


def _check_words(bits, start, n_words, d29, d30):
    """Parity-check n consecutive words; returns (ok, payload_bits, d29, d30)."""
    data = 0
    for w in range(n_words):
        word = _word_at(bits, start + 30 * w)
        ok, d24 = check_parity(word, d29, d30)
        if not ok:
            return False, 0, 0, 0
        data = (data << 24) | d24
        d29 = (word >> 1) & 1
        d30 = word & 1
    return True, data, d29, d30


def find_frame(bits):
    """Locate the subframe alignment in a hard-decision bit stream.

    Looks for the TLM preamble repeating at 300-bit spacing in either
    polarity, and confirms with parity on the TLM+HOW words of both
    candidates. Returns (offset, inverted) or None.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    n = len(bits)
    if n < SUBFRAME_BITS + 310:
        return None
    for inverted in (False, True):
        b = bits ^ 1 if inverted else bits
        for off in range(2, n - SUBFRAME_BITS - 308):
            if not np.array_equal(b[off:off + 8], _PREAMBLE):
                continue
            if not np.array_equal(b[off + 300:off + 308], _PREAMBLE):
                continue
            d29 = int(b[off - 2])
            d30 = int(b[off - 1])
            ok1, _, d29n, d30n = _check_words(b, off, 2, d29, d30)
            if not ok1:
                continue
            ok2, _, _, _ = _check_words(b, off + 300, 2,
                                        int(b[off + 298]), int(b[off + 299]))
            if ok2:
                return off, inverted
    return None


class LnavDecoder:
    """Incremental bit-by-bit LNAV decoder for one channel.

    Feed hard bits with push_bit(); once frame sync is confirmed it decodes
    every complete subframe, latches a TOW anchor (bit index of subframe
    start, GPS seconds of week of that bit edge) and assembles the ephemeris
    from subframes 1-3 with consistent IODE.
    """

    def __init__(self):
        self.bits = []
        self.offset = None
        self.inverted = False
        self.next_subframe_start = None
        self.tow_anchor = None          # (bit_index, seconds_of_week)
        self.ephemeris = None
        self.week = None
        self.parity_failures = 0
        self._payloads = {}
        self._payload_iode = {}
        self._search_from = 0

    def push_bit(self, bit: int):
        self.bits.append(1 if bit else 0)
        if self.offset is None:
            self._try_sync()
        else:
            self._try_decode()

    def _try_sync(self):
        n = len(self.bits)
        if n < 2 * SUBFRAME_BITS + 12 or (n - self._search_from) < 30:
            return
        self._search_from = n
        found = find_frame(np.array(self.bits, dtype=np.uint8))
        if found is None:
            return
        self.offset, self.inverted = found
        self.next_subframe_start = self.offset

    def _try_decode(self):
        while len(self.bits) >= self.next_subframe_start + SUBFRAME_BITS:
            start = self.next_subframe_start
            b = np.array(self.bits[start - 2:start + SUBFRAME_BITS], dtype=np.uint8)
            if self.inverted:
                b = b ^ 1
            ok, payload, _, _ = _check_words(b, 2, 10, int(b[0]), int(b[1]))
            if not ok:
                self.parity_failures += 1
                if self.parity_failures > 2:
                    self.offset = None
                    self.next_subframe_start = None
                    self._search_from = 0
                    return
                self.next_subframe_start += SUBFRAME_BITS
                continue
            self.parity_failures = 0
            self._handle_subframe(start, payload)
            self.next_subframe_start += SUBFRAME_BITS

    def _handle_subframe(self, start_bit, payload):
        sf_id = extract_field(payload, [HOW_SUBFRAME_ID], False)
        tow = extract_field(payload, [HOW_TOW], False)
        if 1 <= sf_id <= 5 and tow > 0:
            # HOW carries the TOW of the *next* subframe start
            self.tow_anchor = (start_bit, tow * 6.0 - 6.0)
        if sf_id in (1, 2, 3):
            self._payloads[sf_id] = payload
            if len(self._payloads) == 3 and self.ephemeris is None:
                try:
                    self.ephemeris = decode_ephemeris(self._payloads)
                    self.week = self.ephemeris.week
                except (ConsistencyError, FieldRangeError, ValueError):
                    # keep collecting; a fresh subframe set may decode
                    self._payloads.pop(2, None)
