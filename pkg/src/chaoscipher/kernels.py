"""Kernel backend selection.

The compiled extension is used when it imports; setting
``CHAOSCIPHER_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("CHAOSCIPHER_PURE_PYTHON", "") not in ("", "0"):
    from chaoscipher import _pykernels as _impl
else:
    try:
        from chaoscipher import _ckernels as _impl
    except ImportError:
        from chaoscipher import _pykernels as _impl

BACKEND = _impl.BACKEND
OK = _impl.OK
NEED_BYTES = _impl.NEED_BYTES
CAP_EXCEEDED = _impl.CAP_EXCEEDED

run_orbit = _impl.run_orbit
escape_rows = _impl.escape_rows
linear_complexity = _impl.linear_complexity
gf2_rank = _impl.gf2_rank
