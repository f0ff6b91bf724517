import numpy as np
import pytest

from gpssdr.constants import GpsConstants
from gpssdr.samples import (FileBlockSource, FramingError, SampleFormat,
                            SampleKind, ingest, serialize)


IQ = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, 5e6)
REAL = SampleFormat(SampleKind.REAL_INT8_WITH_IF, 5e6, 1.25e6)


def test_constants_invariant():
    c = GpsConstants()
    assert c.code_period_s * c.chip_rate_hz == c.code_length_chips
    with pytest.raises(ValueError):
        GpsConstants(code_period_s=2e-3)


def test_iq_pair_to_complex():
    blk = ingest(np.array([3, -4], dtype=np.int8).tobytes(), IQ)
    assert len(blk) == 1
    assert blk.samples[0] == np.complex64(3 - 4j)


def test_real_sample_zero_imag():
    blk = ingest(np.array([7], dtype=np.int8).tobytes(), REAL)
    assert blk.samples[0] == np.complex64(7 + 0j)


def test_iq_format_rejects_if():
    with pytest.raises(ValueError):
        SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, 5e6, 1e6)


def test_odd_byte_count_framing_error():
    with pytest.raises(FramingError):
        ingest(b"\x01\x02\x03", IQ)


def test_empty_is_end_of_stream():
    assert ingest(b"", IQ) is None


def test_ten_megabytes_is_one_second_at_5mhz_iq():
    n_bytes = 10_000_000
    n_samples = n_bytes // IQ.bytes_per_sample
    assert n_samples / IQ.sampling_rate == 1.0


def test_serialize_roundtrip_bit_exact():
    rng = np.random.default_rng(1)
    raw = rng.integers(-128, 128, size=4096, dtype=np.int8).tobytes()
    blk = ingest(raw, IQ, block_index=3, sample_offset=6144)
    assert serialize(blk) == raw
    blk2 = ingest(serialize(blk), IQ)
    assert np.array_equal(blk.raw, blk2.raw)


def test_file_block_source(tmp_path):
    fmt = SampleFormat(SampleKind.IQ_INTERLEAVED_INT8, 1e5)
    rng = np.random.default_rng(0)
    # 5 blocks of 20 ms = 2000 samples = 4000 bytes, plus a partial tail
    data = rng.integers(-128, 128, size=5 * 4000 + 100, dtype=np.int8)
    path = tmp_path / "rec.iq"
    path.write_bytes(data.tobytes())
    src = FileBlockSource(path, fmt, block_ms=20.0)
    blocks = list(src)
    assert len(blocks) == 5
    assert [b.block_index for b in blocks] == [0, 1, 2, 3, 4]
    assert [b.sample_offset for b in blocks] == [0, 2000, 4000, 6000, 8000]
    assert all(len(b) == 2000 for b in blocks)
    joined = np.concatenate([b.raw for b in blocks])
    assert np.array_equal(joined, data[:20000])
