"""Build and load the C correlator helpers, with graceful fallback.

The shared object is compiled from the bundled source on first use and
cached next to it (or in a temp dir when the package dir is read-only).
Returns None when no compiler is available; callers fall back to the pure
numba kernels.
"""

import ctypes
import hashlib
import logging
import os
import shutil
import subprocess
import tempfile

logger = logging.getLogger(__name__)

_SOURCE = os.path.join(os.path.dirname(__file__), "_epl.c")


def _build_dir():
    pkg_dir = os.path.dirname(__file__)
    if os.access(pkg_dir, os.W_OK):
        return pkg_dir
    d = os.path.join(tempfile.gettempdir(), "gpssdr-native")
    os.makedirs(d, exist_ok=True)
    return d


def _compile():
    cc = shutil.which("cc") or shutil.which("gcc") or shutil.which("clang")
    if cc is None or not os.path.exists(_SOURCE):
        return None
    with open(_SOURCE, "rb") as f:
        tag = hashlib.sha256(f.read()).hexdigest()[:16]
    so_path = os.path.join(_build_dir(), f"_epl-{tag}.so")
    if not os.path.exists(so_path):
        tmp = so_path + f".tmp{os.getpid()}"
        cmd = [cc, "-O3", "-march=native", "-shared", "-fPIC",
               "-o", tmp, _SOURCE]
        try:
            subprocess.run(cmd, check=True, capture_output=True, timeout=120)
        except (subprocess.SubprocessError, OSError):
            # retry without -march=native for conservative toolchains
            cmd = [cc, "-O3", "-shared", "-fPIC", "-o", tmp, _SOURCE]
            try:
                subprocess.run(cmd, check=True, capture_output=True, timeout=120)
            except (subprocess.SubprocessError, OSError) as exc:
                logger.warning("native correlator build failed (%s); "
                               "using numba fallback", exc)
                return None
        os.replace(tmp, so_path)
    return so_path


def load():
    """Returns (bin_raw_i8, close_epoch_i8) ctypes functions or None."""
    so_path = _compile()
    if so_path is None:
        return None
    try:
        lib = ctypes.CDLL(so_path)
    except OSError as exc:
        logger.warning("native correlator load failed (%s)", exc)
        return None
    bin_raw = lib.gpssdr_bin_raw_i8
    bin_raw.restype = ctypes.c_int64
    bin_raw.argtypes = [ctypes.c_void_p, ctypes.c_int64, ctypes.c_int64,
                        ctypes.c_int64, ctypes.c_int64,
                        ctypes.c_void_p, ctypes.c_void_p]
    close = lib.gpssdr_close_epoch_i8
    close.restype = None
    close.argtypes = [ctypes.c_void_p, ctypes.c_void_p, ctypes.c_int64,
                      ctypes.c_void_p, ctypes.c_int64, ctypes.c_int64,
                      ctypes.c_int64, ctypes.c_void_p, ctypes.c_void_p,
                      ctypes.c_void_p]
    return bin_raw, close
