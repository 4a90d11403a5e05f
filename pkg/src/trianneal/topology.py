"""Topological-sector diagnostics: domain walls, spinons, dimer mapping.

A domain wall is a vertical string of horizontal antiferromagnetic
bonds.  In any configuration satisfying the triangle rule the number of
such bonds is the same in every row, and that count N_D labels the
topological sector.  Configurations with constraint-breaking triangles
(spinons) carry no sector label.

The dual diagnostic maps each parallel-spin bond to a dimer on the dual
honeycomb lattice (one dual site per triangle); the triangle rule holds
exactly when the dimers form a perfect matching.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeom
from .model import _check_config

SPINONS_PRESENT = "SPINONS_PRESENT"
ROWS_INCONSISTENT = "ROWS_INCONSISTENT"

# Integer codes used in time series and CSV files.
SECTOR_UNDEFINED_SPINONS = -1
SECTOR_UNDEFINED_ROWS = -2


@dataclass(frozen=True)
class SectorLabel:
    """Either DEFINED with an even domain-wall count, or UNDEFINED with a reason."""

    n_dw: int | None
    reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.n_dw is not None

    @property
    def code(self) -> int:
        if self.n_dw is not None:
            return self.n_dw
        return SECTOR_UNDEFINED_SPINONS if self.reason == SPINONS_PRESENT else SECTOR_UNDEFINED_ROWS

    @staticmethod
    def from_code(code: int) -> "SectorLabel":
        if code >= 0:
            return SectorLabel(n_dw=int(code))
        return SectorLabel(
            n_dw=None,
            reason=SPINONS_PRESENT if code == SECTOR_UNDEFINED_SPINONS else ROWS_INCONSISTENT,
        )

    def __str__(self) -> str:
        return str(self.n_dw) if self.defined else f"U:{self.reason}"


@dataclass(frozen=True)
class DimerConfig:
    """Dual-lattice dimers: one per parallel-spin direct bond.

    `dimer_bonds` lists the direct-bond indices carrying a dimer on their
    dual counterpart; `cover` counts dimers touching each dual site
    (= triangle); a perfect matching covers every dual site exactly once.
    """

    dimer_bonds: np.ndarray
    cover: np.ndarray

    @property
    def perfect_matching(self) -> bool:
        return bool(np.all(self.cover == 1))


def row_dw_count(config: np.ndarray, row: int, geom: LatticeGeom) -> int:
    """Horizontal antiferromagnetic bonds in one row (periodic ring)."""
    config = _check_config(config, geom)
    if not 0 <= row < geom.ly:
        raise ValueError(f"row {row} out of range for L_y={geom.ly}")
    r = config[row * geom.lx : (row + 1) * geom.lx]
    return int(np.count_nonzero(r != np.roll(r, -1)))


def _all_row_counts(config: np.ndarray, geom: LatticeGeom) -> np.ndarray:
    rows = config.reshape(geom.ly, geom.lx)
    return np.count_nonzero(rows != np.roll(rows, -1, axis=1), axis=1)


def sector_label(config: np.ndarray, geom: LatticeGeom) -> SectorLabel:
    """Sector of a configuration, or why it has none."""
    from .model import triangle_violations

    config = _check_config(config, geom)
    if triangle_violations(config, geom) > 0:
        return SectorLabel(n_dw=None, reason=SPINONS_PRESENT)
    counts = _all_row_counts(config, geom)
    if np.all(counts == counts[0]):
        return SectorLabel(n_dw=int(counts[0]))
    return SectorLabel(n_dw=None, reason=ROWS_INCONSISTENT)


def sector_code(config: np.ndarray, geom: LatticeGeom) -> int:
    return sector_label(config, geom).code


def spinon_triangles(config: np.ndarray, geom: LatticeGeom) -> list[int]:
    """Indices of all triangles whose three spins are equal."""
    config = _check_config(config, geom)
    sums = config[geom.triangles].sum(axis=1)
    return [int(t) for t in np.flatnonzero(np.abs(sums) == 3)]


def dimer_mapping(config: np.ndarray, geom: LatticeGeom) -> DimerConfig:
    """Place a dimer on the dual bond of every parallel-spin direct bond."""
    config = _check_config(config, geom)
    parallel = config[geom.bond_a] == config[geom.bond_b]
    dimer_bonds = np.flatnonzero(parallel).astype(np.int32)
    cover = np.zeros(geom.n_triangles, dtype=np.int64)
    for t in geom.bond_triangles[dimer_bonds].ravel():
        cover[t] += 1
    return DimerConfig(dimer_bonds=dimer_bonds, cover=cover)


def sector_histogram(records) -> dict[str, float]:
    """Normalized sector proportions over labels, codes, or both mixed.

    UNDEFINED labels are kept as a first-class bin: during annealing most
    snapshots carry spinons, and proportions need a consistent
    denominator.  Keys are 'N_D=<d>' plus 'UNDEFINED'; values sum to 1.
    """
    records = list(records)
    if not records:
        raise ValueError("empty record list")
    counts: Counter[str] = Counter()
    for r in records:
        code = r.code if isinstance(r, SectorLabel) else int(r)
        counts["UNDEFINED" if code < 0 else f"N_D={code}"] += 1
    total = sum(counts.values())
    return {k: v / total for k, v in sorted(counts.items())}
