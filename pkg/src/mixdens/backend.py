"""Numerical backend selection.

Hot kernels ship in two flavors: numba-compiled loops (the default when
numba imports) and pure numpy. The environment variable MIXDENS_BACKEND
picks one:

    MIXDENS_BACKEND=numpy   force the pure-numpy fallback
    MIXDENS_BACKEND=numba   require the compiled path (error if unavailable)
    unset / auto            numba when importable, numpy otherwise

``benchmarks/bench_backends.py`` times the two flavors against each other.
"""

import os

_requested = os.environ.get("MIXDENS_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"MIXDENS_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

if _requested == "numba" and not HAVE_NUMBA:
    raise RuntimeError("MIXDENS_BACKEND=numba but numba is not importable")

USE_NUMBA = HAVE_NUMBA and _requested != "numpy"


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
