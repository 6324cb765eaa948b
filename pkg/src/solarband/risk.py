"""Forecast-error volatility: signed error, its magnitude, and the persistence forecast."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .forecast import ForecastTrack


class NoDefinedRecordsError(ValueError):
    """The forecast track has no record with both sides defined."""


@dataclass(frozen=True, eq=False)
class VolatilityTrack:
    """Signed error ``diff``, its magnitude ``vol``, and the shifted forecast.

    ``vol_pred[t]`` is the persistence forecast of ``vol`` issued ``horizon``
    minutes earlier, i.e. exactly ``vol[t - horizon]`` where that is defined.
    """

    start_time: datetime
    horizon: int
    diff: np.ndarray
    vol: np.ndarray
    vol_pred: np.ndarray

    def __post_init__(self) -> None:
        for name in ("diff", "vol", "vol_pred"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.diff.size


def volatility_track(track: ForecastTrack) -> VolatilityTrack:
    """Derive the volatility signal from a forecast track.

    diff = realized - predicted, vol = |diff|; both undefined wherever either
    input is. The forecast of vol is its own value one horizon earlier.
    """
    diff = track.realized - track.predicted
    if np.isnan(diff).all():
        raise NoDefinedRecordsError("forecast track has no defined records")
    vol = np.abs(diff)
    vol_pred = np.full(diff.size, np.nan)
    if track.horizon < diff.size:
        vol_pred[track.horizon :] = vol[: -track.horizon]
    return VolatilityTrack(
        start_time=track.start_time,
        horizon=track.horizon,
        diff=diff,
        vol=vol,
        vol_pred=vol_pred,
    )
