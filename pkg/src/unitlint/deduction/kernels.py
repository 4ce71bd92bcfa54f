"""Kernel dispatch: the compiled extension when built, else pure Python.

Set ``UNITLINT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from unitlint.deduction import _kernels_py

if os.environ.get("UNITLINT_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from unitlint.deduction import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

rel_err = _impl.rel_err
align_pairs = _impl.align_pairs
approx_check = _impl.approx_check
plateaus = _impl.plateaus
later_hits = _impl.later_hits
