"""Independent ground truth at desk scale.

Exhaustive enumeration of the classical configuration space (N <= 24,
Gray-code incremental energies, Z2-halved) and dense eigen-decomposition
of the transverse-field Hamiltonian (N <= 12).  Everything here is a
reference implementation: clarity and exactness over speed, except that
the raw enumeration loop is jitted so 2^24 states stay under a minute.

Configuration codes: bit i of the code is set when spin i is +1.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import LatticeGeom
from .model import Couplings

MAX_ENUM_SITES = 24
MAX_BOLTZMANN_SITES = 16
MAX_QUANTUM_SITES = 12
_MAX_STORED_ARGMIN = 4096


@dataclass(frozen=True)
class EnumerationReport:
    ground_energy: float
    ground_degeneracy: int
    ground_codes: np.ndarray        # int64 codes; complete if degeneracy allows storage
    sector_counts: dict[str, int] | None

    def ground_configs(self, n_sites: int) -> list[np.ndarray]:
        out = []
        for code in self.ground_codes:
            bits = (int(code) >> np.arange(n_sites)) & 1
            out.append((2 * bits - 1).astype(np.int8))
        return out


@njit(cache=True)
def _energy_of_code(code, bond_a, bond_b, bond_value):
    e = 0.0
    for b in range(bond_a.shape[0]):
        sa = 1.0 if (code >> bond_a[b]) & 1 else -1.0
        sb = 1.0 if (code >> bond_b[b]) & 1 else -1.0
        e += bond_value[b] * sa * sb
    return e


@njit(cache=True)
def _site_flip_delta(code, site, site_bonds, site_nbrs, bond_value):
    si = 1.0 if (code >> site) & 1 else -1.0
    local = 0.0
    for k in range(6):
        sj = 1.0 if (code >> site_nbrs[site, k]) & 1 else -1.0
        local += bond_value[site_bonds[site, k]] * sj
    return -2.0 * si * local


@njit(cache=True)
def _enumerate_half(bond_a, bond_b, bond_value, site_bonds, site_nbrs, n_sites, argmin_cap):
    """Scan all configs with spin 0 fixed to +1 in Gray-code order.

    Returns (min energy, count at min, stored argmin codes).  The Z2
    partner of every config has the same energy, so the caller doubles
    the degeneracy and mirrors the codes.
    """
    half = 1 << (n_sites - 1)
    code = (1 << n_sites) - 1  # all spins up
    e = _energy_of_code(code, bond_a, bond_b, bond_value)
    best = e
    count = 1
    stored = np.empty(argmin_cap, np.int64)
    stored[0] = code
    n_stored = 1
    gray = 0
    eps = 1e-9
    for t in range(1, half):
        g = t ^ (t >> 1)
        changed = gray ^ g
        gray = g
        site = 0
        while (changed >> site) & 1 == 0:
            site += 1
        site += 1  # spin 0 is pinned; Gray bits drive spins 1..N-1
        e += _site_flip_delta(code, site, site_bonds, site_nbrs, bond_value)
        code ^= 1 << site
        if e < best - eps:
            best = e
            count = 1
            stored[0] = code
            n_stored = 1
        elif e <= best + eps:
            count += 1
            if n_stored < argmin_cap:
                stored[n_stored] = code
                n_stored += 1
    return best, count, stored[:n_stored]


@njit(cache=True)
def _all_energies(bond_a, bond_b, bond_value, site_bonds, site_nbrs, n_sites):
    """Energies of every configuration, indexed by code (N <= 16)."""
    total = 1 << n_sites
    out = np.empty(total, np.float64)
    code = 0
    e = _energy_of_code(0, bond_a, bond_b, bond_value)
    out[0] = e
    gray = 0
    for t in range(1, total):
        g = t ^ (t >> 1)
        changed = gray ^ g
        gray = g
        site = 0
        while (changed >> site) & 1 == 0:
            site += 1
        e += _site_flip_delta(code, site, site_bonds, site_nbrs, bond_value)
        code ^= 1 << site
        out[code] = e
    return out


@njit(cache=True)
def _sector_census(triangles, lx, ly, n_sites):
    """Count configs per sector over the whole space: bins for even N_D
    0..lx plus one UNDEFINED bin (last).  Exploits Z2 by scanning half
    the space and doubling."""
    n_bins = lx // 2 + 2
    counts = np.zeros(n_bins, np.int64)
    half = 1 << (n_sites - 1)
    for t in range(half):
        code = (t << 1) | 1  # spin 0 pinned up
        ok = True
        for tri in range(triangles.shape[0]):
            a = (code >> triangles[tri, 0]) & 1
            b = (code >> triangles[tri, 1]) & 1
            c = (code >> triangles[tri, 2]) & 1
            if a == b and b == c:
                ok = False
                break
        if not ok:
            counts[n_bins - 1] += 2
            continue
        ref = -1
        consistent = True
        for y in range(ly):
            cnt = 0
            for x in range(lx):
                s1 = (code >> (y * lx + x)) & 1
                s2 = (code >> (y * lx + ((x + 1) % lx))) & 1
                if s1 != s2:
                    cnt += 1
            if ref < 0:
                ref = cnt
            elif cnt != ref:
                consistent = False
                break
        if consistent:
            counts[ref // 2] += 2
        else:
            counts[n_bins - 1] += 2
    return counts


def enumerate_classical(geom: LatticeGeom, couplings: Couplings, with_sectors: bool = True) -> EnumerationReport:
    """Exact ground energy, degeneracy, argmin set, and sector census."""
    if geom.n_sites > MAX_ENUM_SITES:
        raise ValueError(f"enumeration capped at {MAX_ENUM_SITES} sites, got {geom.n_sites}")
    best, count, stored = _enumerate_half(
        geom.bond_a, geom.bond_b, couplings.bond_value,
        geom.site_bonds, geom.site_nbrs, geom.n_sites, _MAX_STORED_ARGMIN // 2,
    )
    mask = (1 << geom.n_sites) - 1
    codes = np.concatenate([stored, np.bitwise_xor(stored, mask)])
    codes.sort()
    sectors = None
    if with_sectors:
        raw = _sector_census(geom.triangles, geom.lx, geom.ly, geom.n_sites)
        sectors = {f"N_D={2 * i}": int(raw[i]) for i in range(len(raw) - 1)}
        sectors["UNDEFINED"] = int(raw[-1])
    return EnumerationReport(
        ground_energy=float(best),
        ground_degeneracy=2 * int(count),
        ground_codes=codes,
        sector_counts=sectors,
    )


def classical_energies(geom: LatticeGeom, couplings: Couplings) -> np.ndarray:
    """Energy of every configuration, indexed by code (N <= 16)."""
    if geom.n_sites > MAX_BOLTZMANN_SITES:
        raise ValueError(f"full energy table capped at {MAX_BOLTZMANN_SITES} sites")
    return _all_energies(
        geom.bond_a, geom.bond_b, couplings.bond_value,
        geom.site_bonds, geom.site_nbrs, geom.n_sites,
    )


def exact_boltzmann(geom: LatticeGeom, couplings: Couplings, temperature: float) -> np.ndarray:
    """Normalized Boltzmann weights over all configurations (N <= 16)."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    e = classical_energies(geom, couplings)
    w = np.exp(-(e - e.min()) / temperature)
    return w / w.sum()


def _dense_hamiltonian(geom: LatticeGeom, couplings: Couplings, h_i) -> np.ndarray:
    d = 1 << geom.n_sites
    h_vec = np.broadcast_to(np.asarray(h_i, dtype=np.float64), (geom.n_sites,))
    ham = np.zeros((d, d))
    idx = np.arange(d)
    ham[idx, idx] = classical_energies(geom, couplings)
    for i in range(geom.n_sites):
        ham[idx, idx ^ (1 << i)] += h_vec[i]
    return ham


def exact_quantum_energy(geom: LatticeGeom, couplings: Couplings, h_i, temperature: float) -> float:
    """Thermal <H> of the transverse-field Hamiltonian by full diagonalization."""
    return exact_quantum_energy_curve(geom, couplings, h_i, [temperature])[0]


def exact_quantum_energy_curve(geom: LatticeGeom, couplings: Couplings, h_i, temperatures) -> list[float]:
    """Same as exact_quantum_energy for several temperatures per eigensolve."""
    if geom.n_sites > MAX_QUANTUM_SITES:
        raise ValueError(f"dense diagonalization capped at {MAX_QUANTUM_SITES} sites")
    if any(t <= 0 for t in temperatures):
        raise ValueError("temperature must be positive")
    evals = np.linalg.eigvalsh(_dense_hamiltonian(geom, couplings, h_i))
    out = []
    for t in temperatures:
        w = np.exp(-(evals - evals[0]) / t)
        out.append(float(np.dot(evals, w) / w.sum()))
    return out
