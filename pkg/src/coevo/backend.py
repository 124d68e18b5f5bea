"""Selection of the compiled or pure-array execution path.

The environment variable ``COEVO_BACKEND`` picks the implementation of
the hot kernels: ``numba`` for the compiled path, ``numpy`` for the
pure-array fallback, and ``auto`` (or unset) for numba when it is
importable and numpy otherwise. ``use_backend`` overrides the choice
within a scope, which the differential tests lean on.
"""

from __future__ import annotations

import contextlib
import importlib.util
import os
from typing import Iterator

ENV_VAR = "COEVO_BACKEND"

HAS_NUMBA = importlib.util.find_spec("numba") is not None

_BACKENDS = ("numba", "numpy")
_override: list[str] = []


def _check(name: str) -> str:
    if name not in _BACKENDS:
        raise ValueError(
            f"backend must be one of {', '.join(_BACKENDS)} or 'auto', got {name!r}"
        )
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("the numba backend was requested but numba is not installed")
    return name


def default_backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"


def active_backend() -> str:
    """Backend in effect for the current call."""
    if _override:
        return _override[-1]
    raw = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if raw == "auto":
        return default_backend()
    return _check(raw)


@contextlib.contextmanager
def use_backend(name: str) -> Iterator[None]:
    """Force a backend inside a with-block, nesting allowed."""
    _check(name)
    _override.append(name)
    try:
        yield
    finally:
        _override.pop()
