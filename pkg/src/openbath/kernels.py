"""Backend selection for the hot numeric kernels.

The jitted backend is the default.  Set ``OPENBATH_BACKEND=numpy`` (or
``OPENBATH_NO_NUMBA=1``) before import to force the pure-numpy path; the
same flag is what ``benchmarks/bench_kernels.py`` toggles.
"""

import os

_env = os.environ.get("OPENBATH_BACKEND", "").strip().lower()
_no_numba = os.environ.get("OPENBATH_NO_NUMBA", "") not in ("", "0")

if _env == "numpy" or _no_numba:
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:  # numba unavailable: silently fall back
        from . import _kernels_numpy as _impl

        BACKEND = "numpy"

sum_pole_terms = _impl.sum_pole_terms
exp_sum_terms = _impl.exp_sum_terms
band_resolvent_sum = _impl.band_resolvent_sum
pair_convolution_grid = _impl.pair_convolution_grid


def backend_name() -> str:
    return BACKEND
