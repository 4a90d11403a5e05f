"""Hamiltonian bookkeeping: couplings, diagonal energy, flip costs, constraint checks.

The diagonal energy is  E = sum_b J_b * s_a * s_b  with J_b > 0
(antiferromagnetic), J_b = J_x on horizontal bonds and J on interchain
bonds unless a per-bond override is active.  The transverse-field term
is owned by the QMC engine; everything here is classical.
"""

import numpy as np

from .lattice import HORIZONTAL, LatticeGeom
from . import rng as _rng


class Couplings:
    """Per-bond coupling magnitudes and per-site transverse fields.

    `bond_value[b]` is the effective coupling of bond b; it starts at the
    base value for the bond's class and may be overridden (seam cuts and
    glue ramps do this).  `version` increments on every mutation so
    samplers can cache derived weight tables.  Each chain owns a private
    instance; nothing here is shared across chains.
    """

    __slots__ = ("geom", "j", "j_x", "bond_value", "h", "version", "_base")

    def __init__(self, geom: LatticeGeom, j: float = 1.0, j_x: float = 0.9, h: float = 0.0):
        if j < 0 or j_x < 0:
            raise ValueError("couplings are antiferromagnetic magnitudes, must be >= 0")
        if h < 0:
            raise ValueError("transverse field must be >= 0")
        self.geom = geom
        self.j = float(j)
        self.j_x = float(j_x)
        self._base = np.where(geom.bond_class == HORIZONTAL, self.j_x, self.j)
        self.bond_value = self._base.copy()
        self.h = np.full(geom.n_sites, float(h))
        self.version = 0

    def base_value(self, bond: int) -> float:
        return float(self._base[bond])

    def effective(self, bond: int) -> float:
        return float(self.bond_value[bond])

    def set_override(self, bond: int, value: float) -> None:
        if value < 0:
            raise ValueError("bond coupling must be >= 0")
        self.bond_value[bond] = value
        self.version += 1

    def set_overrides(self, bonds: np.ndarray, value: float) -> None:
        """Batch form of set_override (one version bump)."""
        if value < 0:
            raise ValueError("bond coupling must be >= 0")
        self.bond_value[bonds] = value
        self.version += 1

    def clear_override(self, bond: int) -> None:
        self.bond_value[bond] = self._base[bond]
        self.version += 1

    def clear_overrides(self, bonds: np.ndarray) -> None:
        """Batch form of clear_override (one version bump)."""
        self.bond_value[bonds] = self._base[bonds]
        self.version += 1

    def has_overrides(self) -> bool:
        return not np.array_equal(self.bond_value, self._base)

    def set_field(self, site: int, value: float) -> None:
        if value < 0:
            raise ValueError("transverse field must be >= 0")
        self.h[site] = value
        self.version += 1

    def set_all_fields(self, values) -> None:
        values = np.broadcast_to(np.asarray(values, dtype=np.float64), self.h.shape)
        if np.any(values < 0):
            raise ValueError("transverse field must be >= 0")
        self.h[:] = values
        self.version += 1

    def copy(self) -> "Couplings":
        out = Couplings.__new__(Couplings)
        out.geom = self.geom
        out.j = self.j
        out.j_x = self.j_x
        out._base = self._base
        out.bond_value = self.bond_value.copy()
        out.h = self.h.copy()
        out.version = 0
        return out

    def same_as(self, other: "Couplings") -> bool:
        return (
            self.j == other.j
            and self.j_x == other.j_x
            and np.array_equal(self.bond_value, other.bond_value)
            and np.array_equal(self.h, other.h)
        )


def _check_config(config: np.ndarray, geom: LatticeGeom) -> np.ndarray:
    config = np.asarray(config)
    if config.shape != (geom.n_sites,):
        raise ValueError(f"config has shape {config.shape}, expected ({geom.n_sites},)")
    return config


def energy(config: np.ndarray, couplings: Couplings, geom: LatticeGeom) -> float:
    """Classical diagonal energy sum_b J_b s_a s_b."""
    config = _check_config(config, geom)
    prod = config[geom.bond_a].astype(np.float64) * config[geom.bond_b]
    return float(np.dot(couplings.bond_value, prod))


def delta_energy_flip(config: np.ndarray, site: int, couplings: Couplings, geom: LatticeGeom) -> float:
    """Energy change from negating one spin, in O(coordination) time."""
    config = _check_config(config, geom)
    bonds = geom.site_bonds[site]
    nbrs = geom.site_nbrs[site]
    local = float(np.dot(couplings.bond_value[bonds], config[nbrs].astype(np.float64)))
    return -2.0 * float(config[site]) * local


def triangle_violations(config: np.ndarray, geom: LatticeGeom) -> int:
    """Number of triangles whose three spins are all equal."""
    config = _check_config(config, geom)
    sums = config[geom.triangles].sum(axis=1)
    return int(np.count_nonzero(np.abs(sums) == 3))


def stripe_config(geom: LatticeGeom) -> np.ndarray:
    """Rows of uniform spin, alternating sign by row: s(x, y) = (-1)^y.

    Horizontal bonds come out ferromagnetic and interchain bonds
    antiferromagnetic; with J_x < J this is the anisotropy-selected
    ground state.  Odd L_y cannot close the alternation periodically.
    """
    if geom.ly % 2 != 0:
        raise ValueError(f"stripe state needs even L_y, got {geom.ly}")
    y = np.arange(geom.n_sites, dtype=np.int64) // geom.lx
    return np.where(y % 2 == 0, 1, -1).astype(np.int8)


def random_config(geom: LatticeGeom, rng_state: np.ndarray) -> np.ndarray:
    """Uniformly random +-1 configuration drawn from a chain's stream."""
    out = np.empty(geom.n_sites, dtype=np.int8)
    for i in range(geom.n_sites):
        out[i] = 1 if _rng.next_double(rng_state) < 0.5 else -1
    return out
