"""Kernel backend selection, resolved once at import.

The compiled extension is preferred when importable; otherwise the numpy
fallback is used. Set ``BIASFUSE_BACKEND=python`` or ``=cython`` to force a
choice (forcing cython raises if the extension is unavailable).
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("BIASFUSE_BACKEND")
if _choice == "python":
    _impl = _kernels_py
    BACKEND = "python"
elif _choice in (None, "cython"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise ImportError(
                "BIASFUSE_BACKEND=cython but the compiled extension is not built"
            )
        _impl = _kernels_py
        BACKEND = "python"
else:
    raise ValueError(
        f"unknown BIASFUSE_BACKEND {_choice!r}; expected 'cython' or 'python'"
    )

minsum_total = _impl.minsum_total
map_table = _impl.map_table
sim_indices = _impl.sim_indices

# Full conditional-distribution vectors are an analysis helper, not a hot
# loop; the numpy construction serves both backends.
likelihood_arrays = _kernels_py.likelihood_arrays
