"""Kernel backend selection.

The hot inner loops (neighbor-replacement masking, Monte Carlo weight
summands, the radial-ratio oracle) have two interchangeable
implementations: numba ``@njit`` kernels and pure-numpy equivalents.
The active one is picked once, at import time, from the ``DCS_BACKEND``
environment variable:

* ``DCS_BACKEND=numba`` -- force the numba path (raises if numba is missing)
* ``DCS_BACKEND=numpy`` -- force the pure-numpy path
* unset or ``auto``     -- numba when importable, numpy otherwise
"""

from __future__ import annotations

import os

ENV_VAR = "DCS_BACKEND"
_VALID = ("auto", "numba", "numpy")


def _resolve() -> str:
    choice = os.environ.get(ENV_VAR, "auto").strip().lower()
    if choice not in _VALID:
        raise ValueError(
            f"{ENV_VAR} must be one of {_VALID}, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


ACTIVE = _resolve()


def active_backend() -> str:
    """Name of the kernel backend selected at import ('numba' or 'numpy')."""
    return ACTIVE
