"""Per-chain time series and the shared sampling cadence.

Samples are taken at logarithmically spaced cumulative-MCS targets
(200 nominal points per decade, deduplicated at small counts) and at
every annealing-window boundary.  The cadence depends only on the MCS
counter, so chains running the same schedule share one sample grid and
aggregate cleanly.
"""

from dataclasses import dataclass

import numpy as np

LOG_POINTS_PER_DECADE = 200


def log_targets(limit: int) -> np.ndarray:
    """Strictly increasing integer sample points up to and including limit."""
    if limit < 1:
        return np.empty(0, dtype=np.int64)
    n = int(np.ceil(LOG_POINTS_PER_DECADE * np.log10(limit))) + 1
    pts = np.unique(np.round(10 ** (np.arange(n + 1) / LOG_POINTS_PER_DECADE)).astype(np.int64))
    return pts[(pts >= 1) & (pts <= limit)]


@dataclass
class TimeSeries:
    """Samples of one chain: (MCS, window value, energy, spinons, sector code)."""

    mcs: np.ndarray           # (k,) int64, strictly increasing
    window_value: np.ndarray  # (k,) float64, non-increasing (T or h)
    energy: np.ndarray        # (k,) float64, classical diagonal energy
    spinons: np.ndarray       # (k,) int32, triangle-rule violations
    sector: np.ndarray        # (k,) int32, N_D or negative UNDEFINED code

    def __len__(self) -> int:
        return self.mcs.shape[0]


class Recorder:
    """Accumulates samples; `maybe` is cheap enough to call once per MCS."""

    def __init__(self, geom, couplings, total_mcs: int):
        self._geom = geom
        self._couplings = couplings
        self._targets = log_targets(total_mcs)
        self._next_idx = 0
        self._last_mcs = -1
        self._rows: list[tuple[int, float, float, int, int]] = []

    def _record(self, mcs: int, window_value: float, config: np.ndarray) -> None:
        from .model import energy, triangle_violations
        from .topology import sector_label

        e = energy(config, self._couplings, self._geom)
        v = triangle_violations(config, self._geom)
        s = sector_label(config, self._geom).code
        self._rows.append((mcs, window_value, e, v, s))
        self._last_mcs = mcs

    def maybe(self, mcs: int, window_value: float, config: np.ndarray) -> None:
        while self._next_idx < len(self._targets) and self._targets[self._next_idx] <= mcs:
            self._next_idx += 1
        due = self._next_idx > 0 and self._targets[self._next_idx - 1] == mcs
        if due and mcs > self._last_mcs:
            self._record(mcs, window_value, config)

    def next_target(self, mcs: int) -> int:
        """Smallest pending sample point beyond `mcs` (for batched sweeps)."""
        i = self._next_idx
        targets = self._targets
        while i < len(targets) and targets[i] <= mcs:
            i += 1
        return int(targets[i]) if i < len(targets) else np.iinfo(np.int64).max

    def boundary(self, mcs: int, window_value: float, config: np.ndarray) -> None:
        """Force a sample at a window boundary (deduplicated by MCS)."""
        if mcs > self._last_mcs:
            self._record(mcs, window_value, config)

    def finish(self) -> TimeSeries:
        rows = self._rows
        return TimeSeries(
            mcs=np.asarray([r[0] for r in rows], dtype=np.int64),
            window_value=np.asarray([r[1] for r in rows], dtype=np.float64),
            energy=np.asarray([r[2] for r in rows], dtype=np.float64),
            spinons=np.asarray([r[3] for r in rows], dtype=np.int32),
            sector=np.asarray([r[4] for r in rows], dtype=np.int32),
        )
