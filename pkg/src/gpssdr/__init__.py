"""GPS L1 C/A software receiver with simulator, pipeline and benchmarks."""

__version__ = "0.1.0"
