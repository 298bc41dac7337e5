"""Numba/NumPy kernel backend selection.

The hot numeric kernels (Monte Carlo path loops and the filter's dense
kernel application) exist in two interchangeable implementations:

* ``cocofilter._kernels_numba`` -- ``@njit``-compiled loops (default).
* ``cocofilter._kernels_numpy`` -- pure-NumPy fallback with identical
  signatures and identical arithmetic per path.

Selection is driven by the ``COCOFILTER_BACKEND`` environment variable
(``numba`` or ``numpy``).  When unset, numba is used if it imports, with a
silent fallback to numpy otherwise.  Both implementations consume the same
pre-generated noise arrays, in the same order, so results are independent
of the backend up to floating-point rounding of the kernel arithmetic
(bit-identical for the path kernels, which use no transcendental math).

Run ``benchmarks/compare_backends.py`` for a speed comparison.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

from .errors import ConfigError

ENV_VAR = "COCOFILTER_BACKEND"

_cached_name: str | None = None
_cached_module: ModuleType | None = None


def _numba_available() -> bool:
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def backend_name() -> str:
    """Resolved backend name, honoring the environment override."""
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if _numba_available() else "numpy"
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not _numba_available():
            raise ConfigError(
                f"{ENV_VAR}=numba requested but numba is not importable"
            )
        return "numba"
    raise ConfigError(
        f"invalid {ENV_VAR}={requested!r}; expected 'numba' or 'numpy'"
    )


def kernels(name: str | None = None) -> ModuleType:
    """Kernel module for ``name`` (default: the resolved backend)."""
    global _cached_name, _cached_module
    resolved = name or backend_name()
    if resolved == _cached_name and _cached_module is not None:
        return _cached_module
    if resolved == "numba":
        module = importlib.import_module("cocofilter._kernels_numba")
    elif resolved == "numpy":
        module = importlib.import_module("cocofilter._kernels_numpy")
    else:
        raise ConfigError(f"unknown backend {resolved!r}")
    if name is None:
        _cached_name, _cached_module = resolved, module
    return module


def reset_cache() -> None:
    """Forget the cached backend (used after changing the env variable)."""
    global _cached_name, _cached_module
    _cached_name = None
    _cached_module = None
