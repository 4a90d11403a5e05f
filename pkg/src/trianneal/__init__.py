"""Ground-state annealing toolkit for the anisotropic triangular-lattice Ising model.

Provides the lattice/model definitions, a Metropolis sampler (thermal
annealing), a stochastic-series-expansion QMC engine (quantum annealing,
with or without site-random fields, and sweeping annealing with cut/glue
boundary manipulation), topological-sector diagnostics, exhaustive and
exact-diagonalization oracles, and a CLI harness that runs many
independent chains and writes CSV time series.

Time convention used throughout: one Monte Carlo step (MCS) is N
single-spin flip attempts for the classical sampler and one diagonal
pass plus one cluster pass for the QMC engine.  All methods are plotted
against the same MCS axis under this convention.
"""

__version__ = "0.1.0"

from .lattice import LatticeGeom, Seam, build, make_seams
from .model import (
    Couplings,
    delta_energy_flip,
    energy,
    random_config,
    stripe_config,
    triangle_violations,
)
from .topology import (
    SectorLabel,
    dimer_mapping,
    row_dw_count,
    sector_histogram,
    sector_label,
    spinon_triangles,
)

__all__ = [
    "LatticeGeom",
    "Seam",
    "build",
    "make_seams",
    "Couplings",
    "energy",
    "delta_energy_flip",
    "triangle_violations",
    "stripe_config",
    "random_config",
    "SectorLabel",
    "row_dw_count",
    "sector_label",
    "spinon_triangles",
    "dimer_mapping",
    "sector_histogram",
    "__version__",
]
