"""Backend selection for the hot loops.

The compiled extension is used when importable; set ``SYMHEUN_PURE_PYTHON=1``
to force the pure-Python fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("SYMHEUN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

recurrence = _impl.recurrence
horner_d2 = _impl.horner_d2
integrate_polyline = _impl.integrate_polyline

STATUS_OK = _pykernels.STATUS_OK
STATUS_UNDERFLOW = _pykernels.STATUS_UNDERFLOW
STATUS_MAXSTEPS = _pykernels.STATUS_MAXSTEPS

__all__ = ["BACKEND", "recurrence", "horner_d2", "integrate_polyline"]
