"""Backend selection: compiled kernels when available, numpy twin otherwise.

The choice happens once at import. SPARSEREC_BACKEND=python|cython forces a
backend (forcing cython without the built extension is an import error);
``set_backend`` exists so the test suite can exercise both twins in one
process.
"""

import os

from . import _kernels_py

try:
    from . import _kernels
except ImportError:
    _kernels = None

_BACKENDS = {"python": _kernels_py}
if _kernels is not None:
    _BACKENDS["cython"] = _kernels

_forced = os.environ.get("SPARSEREC_BACKEND", "auto")
if _forced not in ("auto", "python", "cython"):
    raise ImportError(f"SPARSEREC_BACKEND must be auto, python, or cython, not {_forced!r}")
if _forced == "cython" and _kernels is None:
    raise ImportError("SPARSEREC_BACKEND=cython but the compiled extension is not built")

if _forced == "auto":
    _active = _kernels if _kernels is not None else _kernels_py
else:
    _active = _BACKENDS[_forced]


def active():
    """The kernel module currently in use."""
    return _active


def backend_name() -> str:
    return _active.NAME


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str):
    """Switch backends in-process (a testing hook; returns the previous name)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(_BACKENDS)}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous
