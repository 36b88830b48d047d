"""Path-loss models: free space and log-distance anchored at free space.

All functions accept scalars or numpy arrays for the distance argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

FSPL_CONST_DB = 92.45  # d in km, f in GHz


@dataclass(frozen=True)
class FreeSpace:
    variant = "FreeSpace"


@dataclass(frozen=True)
class LogDistance:
    exponent_n: float
    ref_distance_km: float = 1.0
    variant = "LogDistance"

    def __post_init__(self):
        if not self.exponent_n >= 1:
            raise ValueError(f"path loss exponent must be >= 1, got {self.exponent_n}")
        if not self.ref_distance_km > 0:
            raise ValueError("reference distance must be positive")


ChannelModel = Union[FreeSpace, LogDistance]


def _check_positive(d_km, f_ghz):
    if np.any(np.asarray(d_km) <= 0) or f_ghz <= 0:
        raise ValueError("distance and frequency must be positive")


def free_space_path_loss(d_km, f_ghz: float):
    _check_positive(d_km, f_ghz)
    return FSPL_CONST_DB + 20.0 * np.log10(d_km) + 20.0 * np.log10(f_ghz)


def log_distance_path_loss(d_km, model: LogDistance, f_ghz: float):
    """FSPL at the reference distance plus ``10 n log10(d / d0)``.

    Distances inside the reference distance are clamped to it.
    """
    _check_positive(d_km, f_ghz)
    d0 = model.ref_distance_km
    d = np.maximum(d_km, d0)
    return free_space_path_loss(d0, f_ghz) + 10.0 * model.exponent_n * np.log10(d / d0)


def path_loss(model: ChannelModel, d_km, f_ghz: float):
    if isinstance(model, FreeSpace):
        return free_space_path_loss(d_km, f_ghz)
    if isinstance(model, LogDistance):
        return log_distance_path_loss(d_km, model, f_ghz)
    raise TypeError(f"unknown channel model {model!r}")
