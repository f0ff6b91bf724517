"""Hamming (32,26) parity of 30-bit LNAV words.

Words are handled as integers with D1 in the most significant bit. Source
data bits d1..d24 are recovered by XOR with the previous word's D30.
"""

# Parity masks over d1..d24 (d1 = bit 23). Each tuple: (uses_d29, uses_d30, mask).
_D_IDX = [
    (True, False, (1, 2, 3, 5, 6, 10, 11, 12, 13, 14, 17, 18, 20, 23)),
    (False, True, (2, 3, 4, 6, 7, 11, 12, 13, 14, 15, 18, 19, 21, 24)),
    (True, False, (1, 3, 4, 5, 7, 8, 12, 13, 14, 15, 16, 19, 20, 22)),
    (False, True, (2, 4, 5, 6, 8, 9, 13, 14, 15, 16, 17, 20, 21, 23)),
    (False, True, (1, 3, 5, 6, 7, 9, 10, 14, 15, 16, 17, 18, 21, 22, 24)),
    (True, False, (3, 5, 6, 8, 9, 10, 11, 13, 15, 19, 22, 23, 24)),
]

_MASKS = [(u29, u30, sum(1 << (24 - i) for i in idx)) for u29, u30, idx in _D_IDX]


def _parity6(data24: int, d29: int, d30: int) -> int:
    bits = 0
    for u29, u30, mask in _MASKS:
        p = bin(data24 & mask).count("1") & 1
        if u29:
            p ^= d29
        if u30:
            p ^= d30
        bits = (bits << 1) | p
    return bits


def check_parity(word: int, d29: int, d30: int):
    """Check one 30-bit word against the six parity equations.

    Returns (passed, data24) where data24 holds the de-complemented source
    bits d1..d24 (valid only when passed).
    """
    received = word & 0x3FFFFFFF
    data = (received >> 6) & 0xFFFFFF
    if d30:
        data ^= 0xFFFFFF
    expect = _parity6(data, d29, d30)
    return (received & 0x3F) == expect, data


def encode_word(data24: int, d29: int, d30: int, solve_tail: bool = False) -> int:
    """Build a transmitted 30-bit word from source data bits.

    With solve_tail, the two lowest data bits are chosen so the word ends
    with D29 = D30 = 0 (HOW and word-10 convention).
    """
    data24 &= 0xFFFFFF
    if solve_tail:
        data24 &= ~0b11
        p = _parity6(data24, d29, d30)
        b29 = (p >> 1) & 1
        b30 = p & 1
        d24_fix = b29                 # D29 mask includes d24 only
        d23_fix = b30 ^ d24_fix       # D30 mask includes d23 and d24
        data24 |= (d23_fix << 1) | d24_fix
    parity = _parity6(data24, d29, d30)
    tx_data = data24 ^ (0xFFFFFF if d30 else 0)
    return (tx_data << 6) | parity
