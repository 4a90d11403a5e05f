"""Experiment runner: many independent chains, CSV output, self-verification.

Chains are embarrassingly parallel; chain k uses the seed
splitmix64(base_seed, k), so results are bitwise reproducible and
independent of worker scheduling.  A finished run directory contains
one CSV per chain, an aggregate CSV, and a manifest; reruns with the
same spec reuse chain files already on disk (they would be byte
identical anyway).
"""

import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .anneal import QaSchedule, QahSchedule, SqaSchedule, run_qa, run_qa_h, run_sqa
from .classical_mc import TaSchedule, run_ta
from .lattice import build
from .model import Couplings
from .record import TimeSeries
from .rng import chain_seed
from .topology import ROWS_INCONSISTENT, SPINONS_PRESENT, SectorLabel

METHODS = ("ta", "qa", "qa-h", "sqa")

CHAIN_COLUMNS = "method,chain,mcs,window_value,energy,spinons,sector"


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one experiment."""

    method: str = "qa"
    lx: int = 6
    ly: int = 6
    j: float = 1.0
    j_x: float = 0.9
    chains: int = 64
    steps_per_window: int = 10_000
    n_cuts: int = 1
    seed: int = 1
    out: Path = field(default_factory=lambda: Path("results"))
    workers: int | None = None
    t_max: float = 5.00
    t_min: float = 0.05
    dt: float = 0.05
    h_max: float = 5.00
    dh: float = 0.05
    t: float = 0.05
    h_cap: float = 10.0

    def __post_init__(self):
        self.out = Path(os.environ.get("TRIANNEAL_OUT", self.out))

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.lx < 3 or self.ly < 3:
            raise ValueError("lattice must be at least 3x3")
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.lx % 2 or self.ly % 2:
            warnings.warn(
                "odd lattice dimension: the stripe ground state does not close "
                "periodically, so energy baselines lose their meaning",
                stacklevel=2,
            )
        self.schedule()  # raises on bad schedule parameters
        if self.method == "sqa" and self.lx % self.n_cuts != 0:
            raise ValueError(f"n_cuts={self.n_cuts} does not divide lx={self.lx}")

    def schedule(self):
        if self.method == "ta":
            return TaSchedule(self.t_max, self.t_min, self.dt, self.steps_per_window)
        if self.method == "qa":
            return QaSchedule(self.h_max, self.dh, self.t, self.steps_per_window)
        if self.method == "qa-h":
            n_windows = len(QaSchedule(self.h_max, self.dh, self.t, 1).windows())
            return QahSchedule(self.h_cap, self.t, n_windows, self.steps_per_window)
        return SqaSchedule(self.n_cuts, self.h_max, self.dh, self.t, self.steps_per_window)

    def method_label(self) -> str:
        return f"sqa-{self.n_cuts}" if self.method == "sqa" else self.method

    def sector_values(self) -> list[int]:
        return list(range(0, self.lx + 1, 2))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["out"] = str(self.out)
        return d


def _warm_kernels() -> None:
    """Trigger jit compilation in the parent so forked workers inherit it."""
    from .model import random_config
    from .rng import seed_state
    from . import sse_qmc
    from .classical_mc import ThermalState, metropolis_sweep

    geom = build(3, 4)
    couplings = Couplings(geom, 1.0, 0.9, h=0.5)
    rng = seed_state(np.uint64(0))
    state = ThermalState(config=random_config(geom, rng), temperature=1.0, rng=rng)
    metropolis_sweep(state, couplings, geom)
    s = sse_qmc.OperatorString(geom, random_config(geom, rng))
    for _ in range(4):
        sse_qmc.qmc_sweep(s, couplings, 1.0, rng)
        sse_qmc.adjust_cutoff(s)
    sse_qmc.purge_zero_weight(s, couplings)


def _run_chain(spec: ExperimentSpec, k: int) -> TimeSeries:
    geom = build(spec.lx, spec.ly)
    couplings = Couplings(geom, spec.j, spec.j_x)
    seed = chain_seed(spec.seed, k)
    sched = spec.schedule()
    if spec.method == "ta":
        return run_ta(geom, couplings, sched, seed)
    if spec.method == "qa":
        return run_qa(geom, couplings, sched, seed)
    if spec.method == "qa-h":
        return run_qa_h(geom, couplings, sched, seed)
    return run_sqa(geom, couplings, sched, seed)


def _chain_path(out: Path, k: int) -> Path:
    return out / f"chain_{k:04d}.csv"


def _format_row(label: str, k: int, ts: TimeSeries, i: int) -> str:
    sector = str(SectorLabel.from_code(int(ts.sector[i])))
    return (
        f"{label},{k},{int(ts.mcs[i])},{float(ts.window_value[i])!r},"
        f"{float(ts.energy[i])!r},{int(ts.spinons[i])},{sector}\n"
    )


def write_chain_csv(path: Path, label: str, k: int, ts: TimeSeries) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as f:
        f.write(CHAIN_COLUMNS + "\n")
        for i in range(len(ts)):
            f.write(_format_row(label, k, ts, i))
    tmp.replace(path)


def read_chain_csv(path: Path) -> TimeSeries:
    mcs, wv, en, sp, sec = [], [], [], [], []
    with open(path) as f:
        header = f.readline().strip()
        if header != CHAIN_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in f:
            parts = line.rstrip("\n").split(",")
            mcs.append(int(parts[2]))
            wv.append(float(parts[3]))
            en.append(float(parts[4]))
            sp.append(int(parts[5]))
            s = parts[6]
            if s.startswith("U:"):
                sec.append(-1 if s[2:] == SPINONS_PRESENT else -2)
            else:
                sec.append(int(s))
    return TimeSeries(
        mcs=np.asarray(mcs, dtype=np.int64),
        window_value=np.asarray(wv),
        energy=np.asarray(en),
        spinons=np.asarray(sp, dtype=np.int32),
        sector=np.asarray(sec, dtype=np.int32),
    )


def aggregate(series: list[TimeSeries], sector_values: list[int]) -> tuple[str, np.ndarray]:
    """Aggregate CSV text plus the sample grid; chains must share the grid."""
    grid = series[0].mcs
    for ts in series[1:]:
        if not np.array_equal(ts.mcs, grid):
            raise ValueError("chains disagree on the sample grid; cannot aggregate")
    energies = np.stack([ts.energy for ts in series])
    sectors = np.stack([ts.sector for ts in series])
    mean = energies.mean(axis=0)
    if len(series) > 1:
        stderr = energies.std(axis=0, ddof=1) / np.sqrt(len(series))
    else:
        stderr = np.zeros_like(mean)
    cols = ["mcs", "mean_energy", "stderr_energy"]
    cols += [f"p_sector_{d}" for d in sector_values] + ["p_undefined"]
    lines = [",".join(cols)]
    for i in range(grid.shape[0]):
        row = [str(int(grid[i])), repr(float(mean[i])), repr(float(stderr[i]))]
        col = sectors[:, i]
        for d in sector_values:
            row.append(repr(float(np.count_nonzero(col == d) / len(series))))
        row.append(repr(float(np.count_nonzero(col < 0) / len(series))))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n", grid


def run_experiment(spec: ExperimentSpec, progress: bool = True) -> Path:
    """Run all chains (reusing any already on disk), write CSVs and manifest."""
    spec.validate()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    label = spec.method_label()

    pending = [k for k in range(spec.chains) if not _chain_path(out, k).exists()]
    workers = spec.workers or min(spec.chains, os.cpu_count() or 1)
    workers = max(1, min(workers, len(pending) or 1))
    if pending:
        if workers == 1:
            for k in pending:
                write_chain_csv(_chain_path(out, k), label, k, _run_chain(spec, k))
                if progress:
                    print(f"[{label}] chain {k} done", flush=True)
        else:
            _warm_kernels()  # compile before forking so children inherit
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(_run_chain, spec, k): k for k in pending}
                for fut in as_completed(futures):
                    k = futures[fut]
                    write_chain_csv(_chain_path(out, k), label, k, fut.result())
                    if progress:
                        print(f"[{label}] chain {k} done", flush=True)

    series = [read_chain_csv(_chain_path(out, k)) for k in range(spec.chains)]
    text, _ = aggregate(series, spec.sector_values())
    (out / "aggregate.csv").write_text(text)
    manifest = {
        "spec": spec.to_dict(),
        "version": __version__,
        "total_mcs": int(spec.schedule().total_mcs()),
        "wall_seconds": time.perf_counter() - t_start,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out


def verify(j: float = 1.0, j_x: float = 0.9, corrupt: bool = False) -> list[tuple[str, bool, str]]:
    """Oracle-backed self-tests; `corrupt` injects a fault (negative control)."""
    from . import model, oracle
    from .classical_mc import _metropolis_histogram
    from .model import stripe_config
    from .rng import seed_state
    from . import sse_qmc
    from .model import random_config

    report = []

    geom = build(6, 6)
    couplings = Couplings(geom, j, j_x)
    if corrupt:
        couplings.set_override(0, couplings.effective(0) * 1.5)
    expected = geom.n_sites * j_x - 2 * geom.n_sites * j
    got = model.energy(stripe_config(geom), couplings, geom)
    ok = abs(got - expected) < 1e-9
    report.append(("stripe-energy-identity", ok, f"computed {got:.6f}, closed form {expected:.6f}"))

    # Detailed balance of the single-attempt kernel on 3x3, exact.
    geom3 = build(3, 3)
    c3 = Couplings(geom3, j, j_x)
    energies = oracle.classical_energies(geom3, c3)
    t_ref = 0.9
    bolt = np.exp(-(energies - energies.min()) / t_ref)
    bolt /= bolt.sum()
    worst = 0.0
    n = geom3.n_sites
    for code in range(1 << n):
        for i in range(n):
            code2 = code ^ (1 << i)
            d_e = energies[code2] - energies[code]
            p_fwd = min(1.0, np.exp(-d_e / t_ref)) / n
            p_bwd = min(1.0, np.exp(d_e / t_ref)) / n
            lhs = bolt[code] * p_fwd
            rhs = bolt[code2] * p_bwd
            worst = max(worst, abs(lhs - rhs) / max(lhs, rhs))
    ok = worst < 1e-12
    report.append(("detailed-balance-3x3", ok, f"worst relative asymmetry {worst:.2e}"))

    # Fixed-temperature stationarity against the exact Boltzmann weights.
    geom4 = build(4, 4)
    c4 = Couplings(geom4, j, j_x)
    probs = oracle.exact_boltzmann(geom4, c4, 2.0)
    rng = seed_state(np.uint64(20240817))
    spins = random_config(geom4, rng)
    counts = np.zeros(1 << geom4.n_sites, dtype=np.int64)
    _metropolis_histogram(spins, geom4.site_bonds, geom4.site_nbrs, c4.bond_value,
                          0.5, 1_000_000, rng, counts)
    counts[:] = 0
    n_attempts = 30_000_000
    _metropolis_histogram(spins, geom4.site_bonds, geom4.site_nbrs, c4.bond_value,
                          0.5, n_attempts, rng, counts)
    tv = 0.5 * np.abs(counts / n_attempts - probs).sum()
    ok = tv < 0.015
    report.append(("metropolis-stationarity-4x4", ok, f"total variation {tv:.4f} over {n_attempts:.0e} attempts"))

    # SSE energy against dense diagonalization on 3x4.
    geom34 = build(3, 4)
    c34 = Couplings(geom34, j, j_x, h=1.5)
    exact = oracle.exact_quantum_energy(geom34, c34, 1.5, 1.0)
    rng = seed_state(np.uint64(7))
    s = sse_qmc.OperatorString(geom34, random_config(geom34, rng))
    for _ in range(2000):
        sse_qmc.qmc_sweep(s, c34, 1.0, rng)
        sse_qmc.adjust_cutoff(s)
    n_meas = 200_000
    ns = np.empty(n_meas)
    for i in range(n_meas):
        sse_qmc.qmc_sweep(s, c34, 1.0, rng)
        ns[i] = s.n
    e = -ns.mean() + sse_qmc.constant_shift(c34)
    bins = ns.reshape(100, -1).mean(axis=1)
    err = bins.std(ddof=1) / 10.0
    ok = abs(e - exact) < 3 * max(err, 1e-6)
    report.append(("sse-vs-exact-3x4", ok, f"SSE {e:.4f} +- {err:.4f}, exact {exact:.4f}"))

    return report
