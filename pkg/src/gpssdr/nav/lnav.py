"""LNAV subframe bit layout shared by the decoder and the test encoder.

Positions are 1-based indices into the 240 source data bits of one subframe
(10 words x 24 bits, parity removed). Split fields list their segments MSB
first. Scales follow IS-GPS-200; semicircle fields convert through pi.
"""

import math

# (name, subframe, segments[(start, nbits)...], signed, scale_pow2, semicircles)
LNAV_FIELDS = [
    ("week",      1, [(49, 10)],            False, 0,   False),
    ("l2_code",   1, [(59, 2)],             False, 0,   False),
    ("ura",       1, [(61, 4)],             False, 0,   False),
    ("health",    1, [(65, 6)],             False, 0,   False),
    ("iodc",      1, [(71, 2), (169, 8)],   False, 0,   False),
    ("tgd",       1, [(161, 8)],            True,  -31, False),
    ("toc",       1, [(177, 16)],           False, 4,   False),
    ("af2",       1, [(193, 8)],            True,  -55, False),
    ("af1",       1, [(201, 16)],           True,  -43, False),
    ("af0",       1, [(217, 22)],           True,  -31, False),
    ("iode",      2, [(49, 8)],             False, 0,   False),
    ("crs",       2, [(57, 16)],            True,  -5,  False),
    ("delta_n",   2, [(73, 16)],            True,  -43, True),
    ("m0",        2, [(89, 8), (97, 24)],   True,  -31, True),
    ("cuc",       2, [(121, 16)],           True,  -29, False),
    ("e",         2, [(137, 8), (145, 24)], False, -33, False),
    ("cus",       2, [(169, 16)],           True,  -29, False),
    ("sqrt_a",    2, [(185, 8), (193, 24)], False, -19, False),
    ("toe",       2, [(217, 16)],           False, 4,   False),
    ("cic",       3, [(49, 16)],            True,  -29, False),
    ("omega0",    3, [(65, 8), (73, 24)],   True,  -31, True),
    ("cis",       3, [(97, 16)],            True,  -29, False),
    ("i0",        3, [(113, 8), (121, 24)], True,  -31, True),
    ("crc",       3, [(145, 16)],           True,  -5,  False),
    ("omega",     3, [(161, 8), (169, 24)], True,  -31, True),
    ("omega_dot", 3, [(193, 24)],           True,  -43, True),
    ("iode_sf3",  3, [(217, 8)],            False, 0,   False),
    ("idot",      3, [(225, 14)],           True,  -43, True),
]

PREAMBLE_BITS = (1, 0, 0, 0, 1, 0, 1, 1)
SUBFRAME_BITS = 300
WORDS_PER_SUBFRAME = 10
DATA_BITS_PER_WORD = 24
PAYLOAD_BITS = WORDS_PER_SUBFRAME * DATA_BITS_PER_WORD
TOW_COUNT_MAX = 100800  # 6-second units per week

# HOW layout (subframe-independent, payload bit positions)
HOW_TOW = (25, 17)
HOW_SUBFRAME_ID = (44, 3)


def field_scale(scale_pow2: int, semicircles: bool) -> float:
    return (2.0 ** scale_pow2) * (math.pi if semicircles else 1.0)


def extract_field(payload: int, segments, signed: bool) -> int:
    """Pull a (possibly split) raw integer out of a 240-bit payload int."""
    value = 0
    total = 0
    for start, nbits in segments:
        shift = PAYLOAD_BITS - (start - 1) - nbits
        value = (value << nbits) | ((payload >> shift) & ((1 << nbits) - 1))
        total += nbits
    if signed and value & (1 << (total - 1)):
        value -= 1 << total
    return value


def insert_field(payload: int, segments, raw: int) -> int:
    total = sum(n for _, n in segments)
    raw &= (1 << total) - 1
    consumed = 0
    for start, nbits in segments:
        consumed += nbits
        part = (raw >> (total - consumed)) & ((1 << nbits) - 1)
        shift = PAYLOAD_BITS - (start - 1) - nbits
        payload = (payload & ~(((1 << nbits) - 1) << shift)) | (part << shift)
    return payload
