"""Backend selection for the hot kernels.

The compiled extension ``ifskit._core`` is used when it imports; otherwise
the numpy/pure-Python twins in ``ifskit._pykernels`` take over.  Tests and the
benchmark switch explicitly with :func:`use_backend`.
"""
import numpy as np

from . import _pykernels

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_BACKENDS = {"python": _pykernels}
if _core is not None:
    _BACKENDS["compiled"] = _core

_active = _BACKENDS.get("compiled", _pykernels)


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "compiled" if _active is _core and _core is not None else "python"


def use_backend(name):
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def edt_1d(mask, h):
    """Distance from every cell to the nearest set cell, ``h`` per index step."""
    return _active.edt_1d(np.ascontiguousarray(mask, dtype=np.uint8), float(h))


def edt_2d(mask, hx, hy):
    return _active.edt_2d(np.ascontiguousarray(mask, dtype=np.uint8), float(hx), float(hy))


def run_orbit(*args):
    return _active.run_orbit(*args)
