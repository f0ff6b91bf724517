"""Raw sample formats, ingest/serialize, and block sources.

The on-disk format is a headerless stream of signed 8-bit integers, either
I/Q interleaved (s0_I, s0_Q, s1_I, s1_Q, ...) or real-only with an IF.
Metadata (rate, kind, IF) travels out-of-band in the session config.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class SampleKind(Enum):
    IQ_INTERLEAVED_INT8 = "iq_int8"
    REAL_INT8_WITH_IF = "real_int8"


class FramingError(ValueError):
    """Raw byte count inconsistent with the sample format."""


@dataclass(frozen=True)
class SampleFormat:
    kind: SampleKind
    sampling_rate: float
    intermediate_frequency: float = 0.0

    def __post_init__(self):
        if self.sampling_rate <= 0:
            raise ValueError("sampling_rate must be positive")
        if self.kind is SampleKind.IQ_INTERLEAVED_INT8 and self.intermediate_frequency != 0.0:
            raise ValueError("IQ format carries no intermediate frequency")

    @property
    def bytes_per_sample(self) -> int:
        return 2 if self.kind is SampleKind.IQ_INTERLEAVED_INT8 else 1


@dataclass
class SampleBlock:
    """One fixed-size chunk of digitized samples flowing through the pipeline.

    `raw` keeps the original int8 stream (interleaved for IQ) so integer
    correlator paths can run without a float conversion; `samples` converts
    lazily to complex64. Q bytes are taken as the imaginary part unmodified.
    """

    raw: np.ndarray
    fmt: SampleFormat
    block_index: int
    sample_offset: int
    _samples: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.raw) // self.fmt.bytes_per_sample

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            if self.fmt.kind is SampleKind.IQ_INTERLEAVED_INT8:
                f = self.raw.astype(np.float32)
                self._samples = (f[0::2] + 1j * f[1::2]).astype(np.complex64)
            else:
                self._samples = self.raw.astype(np.float32).astype(np.complex64)
        return self._samples


def ingest(raw: bytes, fmt: SampleFormat, block_index: int = 0,
           sample_offset: int = 0):
    """Turn raw bytes into a SampleBlock; returns None on empty input (EOS)."""
    if len(raw) == 0:
        return None
    if fmt.kind is SampleKind.IQ_INTERLEAVED_INT8 and len(raw) % 2 != 0:
        raise FramingError(f"IQ stream requires an even byte count, got {len(raw)}")
    arr = np.frombuffer(raw, dtype=np.int8)
    return SampleBlock(raw=arr, fmt=fmt, block_index=block_index,
                       sample_offset=sample_offset)


def serialize(block: SampleBlock) -> bytes:
    return block.raw.tobytes()


class FileBlockSource:
    """Reads fixed-size sample blocks from a headerless int8 recording."""

    def __init__(self, path, fmt: SampleFormat, block_ms: float = 20.0):
        self.path = str(path)
        self.fmt = fmt
        self.samples_per_block = int(round(fmt.sampling_rate * block_ms * 1e-3))
        if self.samples_per_block < 1:
            raise ValueError("block too short for sampling rate")
        self.bytes_per_block = self.samples_per_block * fmt.bytes_per_sample

    def __iter__(self):
        offset = 0
        index = 0
        with open(self.path, "rb") as f:
            while True:
                raw = f.read(self.bytes_per_block)
                if len(raw) < self.bytes_per_block:
                    # Trailing partial block is discarded: block length is
                    # constant per session.
                    return
                yield ingest(raw, self.fmt, block_index=index, sample_offset=offset)
                offset += self.samples_per_block
                index += 1
