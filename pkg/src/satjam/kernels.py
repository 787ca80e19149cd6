"""Select the compiled kernels when available, else the pure-Python ones.

Set ``SATJAM_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` reports which
implementation is active.
"""

import os

from . import _kernels_py

if os.environ.get("SATJAM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "compiled"

rk4_forced = _impl.rk4_forced
costate_flow = _impl.costate_flow
costate_flow_callable = _kernels_py.costate_flow_callable

OK = _kernels_py.OK
NONFINITE = _kernels_py.NONFINITE
PROXIMITY = _kernels_py.PROXIMITY

__all__ = ["BACKEND", "rk4_forced", "costate_flow", "costate_flow_callable"]
