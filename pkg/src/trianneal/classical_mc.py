"""Metropolis single-spin-flip sampler and the thermal-annealing driver.

One Monte Carlo step (MCS) is N flip attempts, each at a uniformly
random site, accepted with probability min(exp(-dE/T), 1).  k_B = 1.
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .lattice import LatticeGeom
from .model import Couplings, random_config
from .record import Recorder, TimeSeries
from .rng import next_below, next_double, seed_state


@njit(cache=True)
def _metropolis_mcs(spins, site_bonds, site_nbrs, bond_value, inv_t, n_mcs, state):
    """Run n_mcs sweeps of N random-site flip attempts; returns acceptances."""
    n = spins.shape[0]
    accepted = 0
    for _ in range(n_mcs * n):
        i = next_below(state, n)
        local = 0.0
        for k in range(6):
            local += bond_value[site_bonds[i, k]] * spins[site_nbrs[i, k]]
        d_e = -2.0 * spins[i] * local
        if d_e <= 0.0 or next_double(state) < np.exp(-d_e * inv_t):
            spins[i] = -spins[i]
            accepted += 1
    return accepted


@njit(cache=True)
def _metropolis_histogram(spins, site_bonds, site_nbrs, bond_value, inv_t, n_attempts, state, counts):
    """Flip attempts that accumulate per-configuration visit counts.

    The configuration code sets bit i when spin i is +1; counts must
    have length 2^N.  Used by the fixed-temperature stationarity checks.
    """
    n = spins.shape[0]
    code = 0
    for i in range(n):
        if spins[i] > 0:
            code |= 1 << i
    for _ in range(n_attempts):
        i = next_below(state, n)
        local = 0.0
        for k in range(6):
            local += bond_value[site_bonds[i, k]] * spins[site_nbrs[i, k]]
        d_e = -2.0 * spins[i] * local
        if d_e <= 0.0 or next_double(state) < np.exp(-d_e * inv_t):
            spins[i] = -spins[i]
            code ^= 1 << i
        counts[code] += 1


@dataclass
class ThermalState:
    """One chain of the classical sampler; never shared across chains."""

    config: np.ndarray
    temperature: float
    rng: np.ndarray
    mcs: int = 0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


def metropolis_sweep(state: ThermalState, couplings: Couplings, geom: LatticeGeom, n_mcs: int = 1) -> ThermalState:
    """Advance the chain by n_mcs Monte Carlo steps in place."""
    if state.temperature <= 0:
        raise ValueError("temperature must be positive")
    _metropolis_mcs(
        state.config,
        geom.site_bonds,
        geom.site_nbrs,
        couplings.bond_value,
        1.0 / state.temperature,
        n_mcs,
        state.rng,
    )
    state.mcs += n_mcs
    return state


@dataclass(frozen=True)
class TaSchedule:
    """Linear cooling: T = t_max, t_max - dt, ..., down to t_min."""

    t_max: float = 5.00
    t_min: float = 0.05
    dt: float = 0.05
    steps_per_window: int = 10_000

    def __post_init__(self):
        if not (self.t_max >= self.t_min > 0):
            raise ValueError("need t_max >= t_min > 0")
        if self.dt <= 0:
            raise ValueError("cooling interval must be positive")
        if self.steps_per_window < 1:
            raise ValueError("steps_per_window must be >= 1")

    def windows(self) -> np.ndarray:
        k = int(np.floor((self.t_max - self.t_min) / self.dt + 1e-9))
        return self.t_max - self.dt * np.arange(k + 1)

    def total_mcs(self) -> int:
        return len(self.windows()) * self.steps_per_window


def run_ta(geom: LatticeGeom, couplings: Couplings, schedule: TaSchedule, seed: int) -> TimeSeries:
    """Thermal annealing from a random start; returns the chain's time series."""
    rng = seed_state(np.uint64(seed))
    state = ThermalState(config=random_config(geom, rng), temperature=schedule.t_max, rng=rng)
    rec = Recorder(geom, couplings, schedule.total_mcs())
    for t in schedule.windows():
        state.temperature = float(t)
        remaining = schedule.steps_per_window
        while remaining > 0:
            step = min(remaining, max(1, rec.next_target(state.mcs) - state.mcs))
            metropolis_sweep(state, couplings, geom, n_mcs=step)
            remaining -= step
            rec.maybe(state.mcs, float(t), state.config)
        rec.boundary(state.mcs, float(t), state.config)
    return rec.finish()
