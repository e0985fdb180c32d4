"""Backend selection: compiled kernels when available, numpy otherwise.

The compiled extension covers the default two-antenna case; other antenna
counts always route to the numpy implementation.  Set OIASIM_BACKEND to
"python" or "compiled" to force a choice (the latter raises if the
extension is missing or N != 2).
"""

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_FORCED = os.environ.get("OIASIM_BACKEND", "").strip().lower()
if _FORCED not in ("", "python", "compiled"):
    raise ValueError(f"OIASIM_BACKEND must be 'python' or 'compiled', got {_FORCED!r}")
if _FORCED == "compiled" and _compiled is None:
    raise ImportError("OIASIM_BACKEND=compiled but the extension is not built")


def have_compiled() -> bool:
    return _compiled is not None


def backend_name(n: int = 2) -> str:
    """Backend that will actually run for antenna count n."""
    return "compiled" if _use_compiled(n) else "python"


def _use_compiled(n: int) -> bool:
    if _FORCED == "python":
        return False
    if _FORCED == "compiled":
        if n != 2:
            raise ValueError("compiled backend requires n == 2")
        return True
    return _compiled is not None and n == 2


def _as_c128(x: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.complex128)
    if not a.flags.writeable:
        a = a.copy()
    return a


def metric_tables(h: np.ndarray, w: np.ndarray):
    """Dispatch `metric_tables(h (T,K,3,3,N,N), w (T,S,3,N))` to a backend."""
    h = _as_c128(h)
    w = _as_c128(w)
    if _use_compiled(h.shape[-1]):
        return _compiled.metric_tables(h, w)
    return _kernels_py.metric_tables(h, w)


def max_sinr_eig(h: np.ndarray, w: np.ndarray, p_s: float, p_i: float, noise_var: float):
    """Dispatch `max_sinr_eig(h (T,K,3,3,N,N), w (T,3,N), ...)` to a backend."""
    h = _as_c128(h)
    w = _as_c128(w)
    if _use_compiled(h.shape[-1]):
        return _compiled.max_sinr_eig(h, w, float(p_s), float(p_i), float(noise_var))
    return _kernels_py.max_sinr_eig(h, w, float(p_s), float(p_i), float(noise_var))
