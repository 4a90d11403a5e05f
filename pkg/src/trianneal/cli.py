"""Command-line interface: run experiments, verify the install, query the oracle.

Config files are flat key=value lines (# comments allowed); keys match
the long option names with either dashes or underscores.  Command-line
options override config values.  The TRIANNEAL_OUT environment variable
overrides the output directory only.
"""

import argparse
import sys
from pathlib import Path

from .harness import METHODS, ExperimentSpec, run_experiment, verify


def _parse_config(path: Path) -> dict:
    out = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_SPEC_FIELDS = {
    "method": str,
    "lx": int,
    "ly": int,
    "j": float,
    "j_x": float,
    "chains": int,
    "steps_per_window": int,
    "n_cuts": int,
    "seed": int,
    "out": Path,
    "workers": int,
    "t_max": float,
    "t_min": float,
    "dt": float,
    "h_max": float,
    "dh": float,
    "t": float,
    "h_cap": float,
}


def _build_spec(args: argparse.Namespace) -> ExperimentSpec:
    values = {}
    if args.config:
        for key, raw in _parse_config(Path(args.config)).items():
            key = {"jx": "j_x"}.get(key, key)
            if key not in _SPEC_FIELDS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _SPEC_FIELDS[key](raw)
    for key in _SPEC_FIELDS:
        arg = getattr(args, key, None)
        if arg is not None:
            values[key] = arg
    return ExperimentSpec(**values)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="trianneal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment (many chains)")
    p_run.add_argument("--config", help="key=value config file")
    p_run.add_argument("--method", choices=METHODS)
    p_run.add_argument("--lx", type=int)
    p_run.add_argument("--ly", type=int)
    p_run.add_argument("--j", type=float)
    p_run.add_argument("--jx", dest="j_x", type=float)
    p_run.add_argument("--chains", type=int)
    p_run.add_argument("--steps-per-window", dest="steps_per_window", type=int)
    p_run.add_argument("--n-cuts", dest="n_cuts", type=int)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out", type=Path)
    p_run.add_argument("--workers", type=int)
    p_run.add_argument("--quiet", action="store_true")

    p_verify = sub.add_parser("verify", help="oracle-backed self tests")
    p_verify.add_argument("--j", type=float, default=1.0)
    p_verify.add_argument("--jx", dest="j_x", type=float, default=0.9)
    p_verify.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    p_enum = sub.add_parser("enumerate", help="exhaustive classical ground-state search")
    p_enum.add_argument("--lx", type=int, required=True)
    p_enum.add_argument("--ly", type=int, required=True)
    p_enum.add_argument("--j", type=float, default=1.0)
    p_enum.add_argument("--jx", dest="j_x", type=float, default=0.9)
    p_enum.add_argument("--no-sectors", action="store_true")
    p_enum.add_argument("--boltzmann", type=float, metavar="T",
                        help="also report the exact thermal energy at temperature T")

    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            spec = _build_spec(args)
            spec.validate()
        except (ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        out = run_experiment(spec, progress=not args.quiet)
        print(f"wrote {spec.chains} chains + aggregate to {out}")
        return 0

    if args.command == "verify":
        report = verify(j=args.j, j_x=args.j_x, corrupt=args.inject_fault)
        failed = 0
        for name, ok, detail in report:
            status = "PASS" if ok else "FAIL"
            print(f"{status}  {name}: {detail}")
            failed += 0 if ok else 1
        print(f"{len(report) - failed}/{len(report)} checks passed")
        return 0 if failed == 0 else 1

    # enumerate
    from .lattice import build
    from .model import Couplings
    from .oracle import enumerate_classical, exact_boltzmann, classical_energies

    try:
        geom = build(args.lx, args.ly)
        couplings = Couplings(geom, args.j, args.j_x)
        report = enumerate_classical(geom, couplings, with_sectors=not args.no_sectors)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"ground energy    {report.ground_energy:.6f}")
    print(f"ground degeneracy {report.ground_degeneracy}")
    if report.sector_counts:
        for name, count in report.sector_counts.items():
            print(f"sector {name}: {count}")
    if args.boltzmann is not None:
        probs = exact_boltzmann(geom, couplings, args.boltzmann)
        energies = classical_energies(geom, couplings)
        print(f"exact <E> at T={args.boltzmann}: {float(probs @ energies):.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
