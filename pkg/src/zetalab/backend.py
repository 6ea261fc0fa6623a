"""Kernel backend selection.

The compiled Cython kernels are preferred; the pure-numpy fallback is used
when the extension is not built or when ``ZETALAB_PURE_PYTHON`` is set to a
truthy value.  Both backends implement the same contracts (fixed summation
order per output, compensated accumulation), so everything downstream is
backend-agnostic up to last-bit rounding.
"""

import os

from zetalab import _kernels_py


def _want_pure_python():
    return os.environ.get("ZETALAB_PURE_PYTHON", "").strip().lower() not in ("", "0", "false")


if _want_pure_python():
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from zetalab import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

dirichlet_sum_batch = _impl.dirichlet_sum_batch
cosine_sum_batch = _impl.cosine_sum_batch


def backend_name():
    """Active kernel backend: 'compiled' or 'python'."""
    return BACKEND
