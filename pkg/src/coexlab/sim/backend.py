"""Kernel backend selection: compiled extension when importable, else pure Python.

Set ``COEX_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("COEX_PURE_PYTHON", "") not in ("", "0"):
    from coexlab.sim._kernel_py import BACKEND, SlotKernel
else:
    try:
        from coexlab.sim._kernel import BACKEND, SlotKernel
    except ImportError:
        from coexlab.sim._kernel_py import BACKEND, SlotKernel

__all__ = ["BACKEND", "SlotKernel"]
