"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
kernels. ``REDWALK_BACKEND=python`` forces the fallback.
"""

import os

from . import _kernels_py as python

BACKEND = "python"
_impl = python

if os.environ.get("REDWALK_BACKEND", "auto").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"
else:
    _compiled = None

walk_one = _impl.walk_one
walk_batch = _impl.walk_batch
coupling_one = _impl.coupling_one
coupling_batch = _impl.coupling_batch

OK = python.OK
EXHAUSTED = python.EXHAUSTED
AMBIGUOUS = python.AMBIGUOUS
NONFINITE = python.NONFINITE


def compiled():
    """The compiled module, or None when unavailable."""
    if _compiled is not None:
        return _compiled
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
