"""LNAV bit-stream encoder, the test-harness inverse of the nav decoder."""

import numpy as np

from ..nav.lnav import (HOW_SUBFRAME_ID, HOW_TOW, LNAV_FIELDS, PAYLOAD_BITS,
                        PREAMBLE_BITS, TOW_COUNT_MAX, field_scale,
                        insert_field)
from ..nav.parity import encode_word


class EncodeError(ValueError):
    """A field does not fit its LNAV bit allocation after scaling."""


def _preamble_payload() -> int:
    payload = 0
    for i, b in enumerate(PREAMBLE_BITS):
        payload = insert_field(payload, [(i + 1, 1)], b)
    return payload


_PREAMBLE_PAYLOAD = _preamble_payload()


def _build_payload(eph, sf_id: int, tow_units: int) -> int:
    payload = _PREAMBLE_PAYLOAD
    payload = insert_field(payload, [HOW_TOW], (tow_units + 1) % TOW_COUNT_MAX)
    payload = insert_field(payload, [HOW_SUBFRAME_ID], sf_id)
    for name, sf, segments, signed, pow2, semi in LNAV_FIELDS:
        if sf != sf_id:
            continue
        attr = "iode" if name == "iode_sf3" else name
        scale = field_scale(pow2, semi)
        raw = int(round(getattr(eph, attr) / scale))
        total = sum(n for _, n in segments)
        lo = -(1 << (total - 1)) if signed else 0
        hi = (1 << (total - 1)) - 1 if signed else (1 << total) - 1
        if not lo <= raw <= hi:
            raise EncodeError(f"field {name} value {raw} exceeds {total} bits")
        payload = insert_field(payload, segments, raw)
    return payload


def _payload_to_words(payload: int, d29: int, d30: int):
    words = []
    for w in range(10):
        shift = PAYLOAD_BITS - 24 * (w + 1)
        data = (payload >> shift) & 0xFFFFFF
        solve = w in (1, 9)  # HOW and word 10 end with D29 = D30 = 0
        word = encode_word(data, d29, d30, solve_tail=solve)
        words.append(word)
        d29 = (word >> 1) & 1
        d30 = word & 1
    return words, d29, d30


def encode_lnav(eph, tow_start_units: int = 0, n_subframes: int = 3) -> np.ndarray:
    """Emit 300-bit subframes cycling 1,2,3 with increasing HOW TOW.

    Returns a 0/1 uint8 array of n_subframes * 300 bits; every 30-bit word
    carries valid parity chained across the stream.
    """
    bits = np.empty(n_subframes * 300, dtype=np.uint8)
    d29 = 0
    d30 = 0
    pos = 0
    for i in range(n_subframes):
        sf_id = (i % 3) + 1
        payload = _build_payload(eph, sf_id, tow_start_units + i)
        words, d29, d30 = _payload_to_words(payload, d29, d30)
        for word in words:
            for k in range(29, -1, -1):
                bits[pos] = (word >> k) & 1
                pos += 1
    return bits
