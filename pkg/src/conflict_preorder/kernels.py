"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
module provides the same functions.
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

DEFAULT = "cython" if _ckernels is not None else "python"


def get(name: str | None = None):
    """Return the kernel module called ``name`` (default: the fastest available)."""
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {sorted(BACKENDS)}") from None
