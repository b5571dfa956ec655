"""Selects the compiled kernel module when available.

Set ``FINITEDR_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

from . import _kernels_py

if os.environ.get("FINITEDR_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

KERNEL_NAME = _impl.KERNEL_NAME
pr_add = _impl.pr_add
pr_mul = _impl.pr_mul
merge_factors = _impl.merge_factors
dp_mul = _impl.dp_mul
dp_add_scaled = _impl.dp_add_scaled


def implementations():
    """All importable kernel modules, keyed by name (used by tests and benchmarks)."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found[_kernels.KERNEL_NAME] = _kernels
    return found
