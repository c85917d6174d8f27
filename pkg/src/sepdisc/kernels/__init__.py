"""Sweep kernel backends.

The compiled Cython module is preferred when it imported cleanly; setting
SEPDISC_PURE_PYTHON=1 in the environment forces the numpy fallback. The
choice is made once at import time.
"""

import os

from . import _pure

try:
    from . import _core
    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False

_FORCE_PURE = os.environ.get("SEPDISC_PURE_PYTHON", "") == "1"
_ACTIVE = _pure if (_FORCE_PURE or not HAVE_COMPILED) else _core


def active():
    """The backend module in use (same contract for both)."""
    return _ACTIVE


def backend_name() -> str:
    return "pure-python" if _ACTIVE is _pure else "compiled"
