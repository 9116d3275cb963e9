"""Kernel backend selection.

The compiled Cython kernels are used when the extension was built; otherwise
(or when ``PLANARENDS_PURE_PYTHON=1``) the numpy twins are used. Both expose
``force_sums``, ``force_jacobian``, ``gvalue_jacobian``, ``min_separation``
and ``log_potential`` with identical semantics.
"""

import os

from . import _pykernels

_FORCE_PY = os.environ.get("PLANARENDS_PURE_PYTHON", "") not in ("", "0")

try:
    if _FORCE_PY:
        raise ImportError("pure-python kernels requested")
    from . import _ckernels as _impl
except ImportError:
    _impl = _pykernels

BACKEND = _impl.BACKEND
force_sums = _impl.force_sums
force_jacobian = _impl.force_jacobian
gvalue_jacobian = _impl.gvalue_jacobian
min_separation = _impl.min_separation
log_potential = _impl.log_potential


def available_backends():
    """Return the kernel modules importable in this environment, by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
