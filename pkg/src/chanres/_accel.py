"""Backend switch for the compiled kernels.

The hot loop of the package -- Schur-complement assembly in the conic solver --
exists in two flavours: a numba ``@njit`` version and a pure-numpy version.
The numba path is used when numba imports cleanly and the environment variable
``CHANRES_DISABLE_NUMBA`` is not set to a truthy value.  ``set_backend`` lets
tests and benchmarks flip the choice at runtime.
"""

from __future__ import annotations

import os

ENV_FLAG = "CHANRES_DISABLE_NUMBA"

_TRUTHY = {"1", "true", "yes", "on"}

try:  # pragma: no cover - exercised implicitly by import
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _numba = None
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in _TRUTHY


_backend = "numba" if (HAVE_NUMBA and not _env_disabled()) else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend() -> str:
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return _backend


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous one."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous
