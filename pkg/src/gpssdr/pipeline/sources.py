"""Sample block sources feeding the producer loop."""

import numpy as np

from ..samples import FileBlockSource, SampleBlock, SampleFormat
from ..sim.generator import Simulator


class FileSource:
    """Headerless int8 recording on disk."""

    def __init__(self, path, fmt: SampleFormat, block_ms: float = 20.0):
        self._src = FileBlockSource(path, fmt, block_ms=block_ms)
        self.fmt = fmt
        self.block_ms = block_ms
        self.samples_per_block = self._src.samples_per_block

    def blocks(self):
        yield from self._src


class SimSource:
    """Stream a scenario directly into the pipeline without a file."""

    def __init__(self, scenario, block_ms: float = 20.0):
        self._sim = Simulator(scenario, block_ms=block_ms)
        self.fmt = scenario.fmt
        self.block_ms = block_ms
        self.samples_per_block = self._sim.samples_per_block
        self.truth = self._sim.truth

    def blocks(self):
        offset = 0
        for index, raw in enumerate(self._sim.blocks()):
            yield SampleBlock(raw=np.frombuffer(raw, dtype=np.int8),
                              fmt=self.fmt, block_index=index,
                              sample_offset=offset)
            offset += self.samples_per_block
