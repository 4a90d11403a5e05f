"""Production sweep for the method-comparison experiments.

Runs each method at full scale (6x6, 64 chains, >= 1e6 MCS per chain)
into results/ordering/<label>/, reusing chains already on disk, so the
script can be interrupted and restarted at any point.  Methods run in
the order the analysis needs them.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from trianneal.harness import ExperimentSpec, run_experiment

BASE = Path(__file__).resolve().parents[1] / "results" / "ordering"

RUNS = [
    ("ta",    dict(method="ta",   seed=20250810)),
    ("qa",    dict(method="qa",   seed=20250811)),
    ("sqa-6", dict(method="sqa",  n_cuts=6, seed=20250816)),
    ("sqa-1", dict(method="sqa",  n_cuts=1, seed=20250813)),
    ("sqa-2", dict(method="sqa",  n_cuts=2, seed=20250814)),
    ("sqa-3", dict(method="sqa",  n_cuts=3, seed=20250815)),
    ("qa-h",  dict(method="qa-h", seed=20250812)),
]


def main():
    only = set(sys.argv[1:])
    for label, kw in RUNS:
        if only and label not in only:
            continue
        out = BASE / label
        t0 = time.time()
        spec = ExperimentSpec(lx=6, ly=6, j=1.0, j_x=0.9, chains=64,
                              steps_per_window=10_000, workers=1, out=out, **kw)
        print(f"=== {label}: total {spec.schedule().total_mcs()} MCS/chain -> {out}", flush=True)
        run_experiment(spec, progress=True)
        print(f"=== {label} finished in {(time.time() - t0) / 3600:.2f} h", flush=True)


if __name__ == "__main__":
    main()
