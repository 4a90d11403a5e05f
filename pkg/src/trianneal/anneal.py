"""Annealing protocol drivers: QA, QA-h, and SQA-n (TA lives in classical_mc).

All quantum drivers share the pattern: linearly decreasing field windows
at fixed low temperature, a fixed number of QMC sweeps per window, and
samples recorded on the shared log cadence plus every window boundary.
Window values are computed as h_max - k*dh (never by repeated
subtraction) and the endpoint h = 0 is replaced by the residual field
h_res = 1e-3 * J inside the engine while the schedule value 0.00 is what
gets recorded.

SQA-n adds the cut/glue loop: per window the n equally spaced seams are
visited left to right; each seam is cut (horizontal couplings across it
set to zero, adjacent interchain couplings softened to J_x/2), then
restored over ns = steps_per_window // n glue steps, one QMC sweep per
step.  After the last glue step the couplings are exactly the base
values again.  The driver mutates the passed Couplings in place; each
chain must own a private copy.
"""

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeom, Seam, make_seams
from .model import Couplings, random_config
from .record import Recorder, TimeSeries
from .rng import next_double, seed_state
from .sse_qmc import (
    RESIDUAL_FIELD_FRACTION,
    OperatorString,
    adjust_cutoff,
    purge_zero_weight,
    qmc_sweep,
)


@dataclass(frozen=True)
class QaSchedule:
    """Uniform transverse field lowered linearly: h = h_max, h_max-dh, ..., 0."""

    h_max: float = 5.00
    dh: float = 0.05
    t: float = 0.05
    steps_per_window: int = 10_000

    def __post_init__(self):
        if self.h_max <= 0 or self.dh <= 0:
            raise ValueError("need h_max > 0 and dh > 0")
        if self.t <= 0:
            raise ValueError("temperature must be positive")
        if self.steps_per_window < 1:
            raise ValueError("steps_per_window must be >= 1")

    def windows(self) -> np.ndarray:
        k = int(np.floor(self.h_max / self.dh + 1e-9))
        return self.h_max - self.dh * np.arange(k + 1)

    def total_mcs(self) -> int:
        return len(self.windows()) * self.steps_per_window


@dataclass(frozen=True)
class QahSchedule:
    """Site-random initial fields h_i ~ U[0, h_cap], all ramped linearly to 0."""

    h_cap: float = 10.0
    t: float = 0.05
    n_windows: int = 101
    steps_per_window: int = 10_000

    def __post_init__(self):
        if self.h_cap <= 0:
            raise ValueError("h_cap must be positive")
        if self.t <= 0:
            raise ValueError("temperature must be positive")
        if self.n_windows < 2:
            raise ValueError("need at least two windows for a ramp")
        if self.steps_per_window < 1:
            raise ValueError("steps_per_window must be >= 1")

    def ramp_factors(self) -> np.ndarray:
        w = self.n_windows - 1
        return 1.0 - np.arange(self.n_windows) / w

    def total_mcs(self) -> int:
        return self.n_windows * self.steps_per_window


@dataclass(frozen=True)
class SqaSchedule:
    """QA schedule plus n_cuts seam positions swept within every window."""

    n_cuts: int = 1
    h_max: float = 5.00
    dh: float = 0.05
    t: float = 0.05
    steps_per_window: int = 10_000

    def __post_init__(self):
        if self.n_cuts < 1:
            raise ValueError("n_cuts must be >= 1")
        if self.h_max <= 0 or self.dh <= 0:
            raise ValueError("need h_max > 0 and dh > 0")
        if self.t <= 0:
            raise ValueError("temperature must be positive")
        if self.steps_per_window < self.n_cuts:
            raise ValueError("steps_per_window must be >= n_cuts so each seam gets a sweep")

    def windows(self) -> np.ndarray:
        k = int(np.floor(self.h_max / self.dh + 1e-9))
        return self.h_max - self.dh * np.arange(k + 1)

    @property
    def ns(self) -> int:
        """Glue steps per seam (floor; each window runs n_cuts * ns sweeps)."""
        return self.steps_per_window // self.n_cuts

    def total_mcs(self) -> int:
        return len(self.windows()) * self.n_cuts * self.ns


def apply_cut(couplings: Couplings, seam: Seam) -> Couplings:
    """Open one seam: severed bonds to zero, softened bonds to J_x/2.

    Rejects the cut when any affected bond already deviates from its
    base value, which catches overlapping open seams.
    """
    affected = np.concatenate([seam.severed, seam.softened])
    if not np.array_equal(couplings.bond_value[affected], couplings._base[affected]):
        raise ValueError("seam overlaps a seam that is still open")
    couplings.set_overrides(seam.severed, 0.0)
    couplings.set_overrides(seam.softened, couplings.j_x / 2.0)
    return couplings


def glue_step(couplings: Couplings, seam: Seam, ns: int, step_index: int) -> Couplings:
    """One gluing increment; step ns restores the base couplings exactly.

    Values are computed as step_index * increment rather than by repeated
    addition, so no floating-point drift accumulates, and the final step
    clears the overrides outright.
    """
    if ns < 1:
        raise ValueError("ns must be >= 1")
    if not 1 <= step_index <= ns:
        raise ValueError(f"glue step {step_index} outside 1..{ns}")
    if step_index == 1 and np.any(couplings.bond_value[seam.severed] != 0.0):
        raise ValueError("glue_step on a seam that is not cut")
    if step_index == ns:
        couplings.clear_overrides(seam.severed)
        couplings.clear_overrides(seam.softened)
        return couplings
    f = step_index / ns
    j_e0 = couplings.j_x / 2.0
    couplings.set_overrides(seam.severed, couplings.j_x * f)
    couplings.set_overrides(seam.softened, j_e0 + (couplings.j - j_e0) * f)
    return couplings


def _residual_field(couplings: Couplings) -> float:
    return RESIDUAL_FIELD_FRACTION * couplings.j


def run_qa(geom: LatticeGeom, couplings: Couplings, schedule: QaSchedule, seed: int) -> TimeSeries:
    """Quantum annealing with a uniform field; mutates `couplings` fields."""
    rng = seed_state(np.uint64(seed))
    string = OperatorString(geom, random_config(geom, rng))
    rec = Recorder(geom, couplings, schedule.total_mcs())
    beta = 1.0 / schedule.t
    h_res = _residual_field(couplings)
    equil = max(1, schedule.steps_per_window // 10)
    for h in schedule.windows():
        couplings.set_all_fields(max(float(h), h_res))
        for step in range(schedule.steps_per_window):
            qmc_sweep(string, couplings, beta, rng)
            if step < equil:
                adjust_cutoff(string)
            rec.maybe(string.mcs, float(h), string.alpha)
        rec.boundary(string.mcs, float(h), string.alpha)
    return rec.finish()


def run_qa_h(
    geom: LatticeGeom,
    couplings: Couplings,
    schedule: QahSchedule,
    seed: int,
    initial_fields: np.ndarray | None = None,
) -> TimeSeries:
    """Quantum annealing with site-random fields ramped jointly to zero.

    `initial_fields` overrides the uniform draw (used by tests to force
    degenerate configurations); the recorded window value is the ramp
    factor times h_cap.
    """
    rng = seed_state(np.uint64(seed))
    if initial_fields is None:
        h0 = np.array([schedule.h_cap * next_double(rng) for _ in range(geom.n_sites)])
    else:
        h0 = np.asarray(initial_fields, dtype=np.float64).copy()
        if h0.shape != (geom.n_sites,) or np.any(h0 < 0):
            raise ValueError("initial_fields must be non-negative, one per site")
    string = OperatorString(geom, random_config(geom, rng))
    rec = Recorder(geom, couplings, schedule.total_mcs())
    beta = 1.0 / schedule.t
    h_res = _residual_field(couplings)
    equil = max(1, schedule.steps_per_window // 10)
    for f in schedule.ramp_factors():
        couplings.set_all_fields(np.maximum(h0 * float(f), h_res))
        window_value = schedule.h_cap * float(f)
        for step in range(schedule.steps_per_window):
            qmc_sweep(string, couplings, beta, rng)
            if step < equil:
                adjust_cutoff(string)
            rec.maybe(string.mcs, window_value, string.alpha)
        rec.boundary(string.mcs, window_value, string.alpha)
    return rec.finish()


def run_sqa(geom: LatticeGeom, couplings: Couplings, schedule: SqaSchedule, seed: int) -> TimeSeries:
    """Sweeping quantum annealing with n_cuts cut/glue positions per window."""
    seams = make_seams(geom, schedule.n_cuts)
    rng = seed_state(np.uint64(seed))
    string = OperatorString(geom, random_config(geom, rng))
    rec = Recorder(geom, couplings, schedule.total_mcs())
    beta = 1.0 / schedule.t
    h_res = _residual_field(couplings)
    ns = schedule.ns
    per_window = schedule.n_cuts * ns
    equil = max(1, per_window // 10)
    for h in schedule.windows():
        couplings.set_all_fields(max(float(h), h_res))
        step = 0
        for seam in seams:
            apply_cut(couplings, seam)
            purge_zero_weight(string, couplings)
            for ig in range(1, ns + 1):
                qmc_sweep(string, couplings, beta, rng)
                step += 1
                if step <= equil:
                    adjust_cutoff(string)
                glue_step(couplings, seam, ns, ig)
                rec.maybe(string.mcs, float(h), string.alpha)
        rec.boundary(string.mcs, float(h), string.alpha)
    return rec.finish()
