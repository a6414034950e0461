"""Kernel backend selection.

Hot inner loops ship in two variants: numba @njit kernels and pure-numpy
fallbacks.  The default is numba when it imports; set

    HEAPSHIELD_BACKEND=numpy

to force the fallback path (useful for debugging and for the backend
benchmark), or HEAPSHIELD_BACKEND=numba to fail loudly when numba is
missing.  The flag is read once at import time.
"""

import os

_flag = os.environ.get("HEAPSHIELD_BACKEND", "").strip().lower()
if _flag not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"HEAPSHIELD_BACKEND must be 'numba' or 'numpy', got {_flag!r}"
    )

if _flag == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _flag == "numba":
            raise RuntimeError("HEAPSHIELD_BACKEND=numba but numba is not importable")
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
