"""Kernel backend selection: compiled extension if present, numpy otherwise.

Set ERGOKIT_PURE=1 to force the numpy fallback; used by the benchmark and
by the backend-equivalence tests.
"""

from __future__ import annotations

import os

from . import _kernels_py

_impl = _kernels_py
BACKEND = "python"

if os.environ.get("ERGOKIT_PURE", "0").strip() in ("", "0"):
    try:
        from . import _kernels as _compiled

        _impl = _compiled
        BACKEND = "compiled"
    except ImportError:
        pass

mc_max_ratio = _impl.mc_max_ratio
max_pair_half_l1 = _impl.max_pair_half_l1
