"""Dispatch to the active kernel backend (see ``dcs.backend``)."""

from __future__ import annotations

from . import backend

if backend.ACTIVE == "numba":
    from ._kernels_nb import (  # noqa: F401
        grid_neighbor_replace,
        k_weight_summands,
        radial_ratios,
        window_neighbor_replace,
    )
else:
    from ._kernels_np import (  # noqa: F401
        grid_neighbor_replace,
        k_weight_summands,
        radial_ratios,
        window_neighbor_replace,
    )

active_backend = backend.active_backend
