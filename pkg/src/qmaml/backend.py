"""Kernel backend selection.

The hot statevector kernels exist twice: a numba-compiled version and a pure
numpy fallback with identical contracts.  The environment variable
``QMAML_BACKEND`` picks one at import time:

* unset      -- numba if importable, else numpy
* ``numba``  -- require numba, fail loudly if missing
* ``numpy``  -- force the fallback (useful for debugging and benchmarking)
"""

import os

from . import kernels_numpy

_requested = os.environ.get("QMAML_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"QMAML_BACKEND={_requested!r} not recognized; use 'numba' or 'numpy'"
    )

if _requested == "numpy":
    _kernels = kernels_numpy
    _active = "numpy"
else:
    try:
        from . import kernels_numba as _kernels

        _active = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _kernels = kernels_numpy
        _active = "numpy"


def active_backend() -> str:
    return _active


def get_kernels():
    return _kernels
