"""Import-time selection of the power-minimization kernel.

The compiled Cython extension is preferred; the pure-NumPy twin is used when
the extension is unavailable or when HOPBEAM_PURE_PYTHON=1 is set. Both
expose the same `duality_power_min` contract.
"""

from __future__ import annotations

import os

from . import _duality_py

STATUS_OK = _duality_py.STATUS_OK
STATUS_DIVERGED = _duality_py.STATUS_DIVERGED

if os.environ.get("HOPBEAM_PURE_PYTHON", "") == "1":
    _impl = _duality_py
    BACKEND = "python"
else:
    try:
        from . import _duality as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _duality_py
        BACKEND = "python"

duality_power_min = _impl.duality_power_min
