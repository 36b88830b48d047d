"""Backend selection for the planner's max-plus layer update.

The compiled kernel is used when the extension was built; otherwise the
numpy implementation runs. Both produce bit-identical layers.
"""

from __future__ import annotations

import numpy as np


def maxplus_layer_numpy(v_old, indptr, preds, reward, v_new, nthreads=1):
    vals = np.append(v_old[preds], -np.inf)
    starts = indptr[:-1]
    best = np.maximum.reduceat(vals, starts)
    best[starts == indptr[1:]] = -np.inf
    np.add(best, reward, out=v_new)


try:
    from ._dpcore import maxplus_layer as maxplus_layer_compiled
except ImportError:  # extension not built
    maxplus_layer_compiled = None

BACKENDS = {"numpy": maxplus_layer_numpy}
if maxplus_layer_compiled is not None:
    BACKENDS["compiled"] = maxplus_layer_compiled

DEFAULT_BACKEND = "compiled" if maxplus_layer_compiled is not None else "numpy"


def get_backend(name: str | None = None):
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
