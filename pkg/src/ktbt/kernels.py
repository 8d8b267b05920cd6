"""Backend selection for the sensing kernel.

The compiled extension is used when it was built; otherwise the pure-Python
twin. Set ``KTBT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
sense_all = _kernels_py.sense_all

if os.environ.get("KTBT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        sense_all = _compiled.sense_all


def backends():
    """Every importable backend as ``{name: sense_all}``."""
    found = {"python": _kernels_py.sense_all}
    try:
        from . import _kernels as _compiled
    except ImportError:
        return found
    found["compiled"] = _compiled.sense_all
    return found
