"""Command line entry point: ``qpebench build|run|sweep|report``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .analysis import estimate, fci_energy, reference_energy
from .circuit import Circuit, resource_report
from .experiment import (
    ConfigError,
    check_summary,
    load_config,
    read_csv,
    resolve_hamiltonian,
    run_experiment,
    summarize,
    write_outputs,
)
from .qpe import EvolutionSpec, QpeSpec, build_qpe
from .simulator import NoiseModel, run, scale_noise


def _initial_state(value: str | None):
    if value is None:
        return None
    if set(value) <= {"0", "1"}:
        return value
    amps = json.loads(Path(value).read_text(encoding="utf-8"))
    return [complex(*a) if isinstance(a, list) else complex(a) for a in amps]


def _hamiltonian_source(args) -> dict:
    if args.hamiltonian:
        return {"file": args.hamiltonian}
    return {"preset": args.preset}


def _spec(args) -> QpeSpec:
    h = resolve_hamiltonian(_hamiltonian_source(args))
    ev = EvolutionSpec(h, args.time, args.trotter_steps)
    return QpeSpec(ev, args.k, _initial_state(args.initial_state), args.window_center)


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--hamiltonian", metavar="FILE", help="Pauli-sum JSON file")
    src.add_argument("--preset", default="h2", help="built-in Hamiltonian (default: h2)")
    p.add_argument("--k", type=int, required=True, help="readout qubits")
    p.add_argument("--trotter-steps", type=int, default=1)
    p.add_argument("--time", type=float, default=0.5, help="evolution time t")
    p.add_argument("--initial-state", help="bitstring, or JSON file of amplitudes")
    p.add_argument("--window-center", type=float, help="energy branch centre")


def cmd_build(args) -> int:
    circuit = build_qpe(_spec(args))
    report = resource_report(circuit).to_dict()
    if args.output:
        Path(args.output).write_text(circuit.to_json(), encoding="utf-8")
        print(json.dumps(report, indent=1))
    else:
        print(json.dumps({"resources": report, "circuit": circuit.to_dict()}, indent=1))
    return 0


def cmd_run(args) -> int:
    spec = _spec(args)
    circuit = Circuit.from_json(Path(args.circuit).read_text()) if args.circuit else build_qpe(spec)
    noise = None
    if not args.noiseless:
        base = NoiseModel.from_dict(json.loads(Path(args.noise).read_text())) if args.noise else NoiseModel()
        noise = scale_noise(base, args.scale, args.p2_scale, args.mem_scale)
    counts = run(circuit, noise, args.shots, args.seed, workers=args.workers)
    est = estimate(counts, spec)
    out = {
        "estimate": {k: (repr(v) if isinstance(v, float) and math.isinf(v) else v) for k, v in est.to_dict().items()},
        "e_ref_trotter": reference_energy(spec),
        "e_ref_fci": fci_energy(spec),
        "counts": counts.to_dict(),
    }
    text = json.dumps(out, indent=1)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg = type(cfg)(**{**cfg.__dict__, "workers": args.workers})
    records, resources = run_experiment(cfg)
    out = write_outputs(cfg, records, resources, args.output)
    failed = sum(r["status"] != "ok" for r in records)
    print(f"{len(records)} records, {len(resources)} circuits, {failed} failed -> {out}")
    return 0


def cmd_report(args) -> int:
    root = Path(args.directory)
    records = read_csv(root / "records.csv") if (root / "records.csv").exists() else []
    resources = read_csv(root / "resources.csv") if (root / "resources.csv").exists() else []
    summary = summarize(records, resources)
    text = json.dumps(summary, indent=1)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        print(text)
    if not args.check:
        return 0
    failed = 0
    for name, passed, detail in check_summary(summary):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}", file=sys.stderr)
        failed += not passed
    return 1 if failed else 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpebench", description="Phase estimation benchmarks on small Hamiltonians")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a QPE circuit and report its resources")
    _add_problem_args(p)
    p.add_argument("-o", "--output", help="write circuit JSON here")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("run", help="sample a QPE circuit and estimate the energy")
    _add_problem_args(p)
    p.add_argument("--circuit", help="circuit JSON from 'build' (else built from the flags)")
    p.add_argument("--shots", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--noise", metavar="FILE", help="noise model JSON (default: built-in rates)")
    p.add_argument("--scale", type=float, default=1.0, help="global noise scale")
    p.add_argument("--p2-scale", type=float, default=1.0)
    p.add_argument("--mem-scale", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a TOML/JSON experiment config")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory (overrides the config)")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="summarise a sweep directory")
    p.add_argument("directory")
    p.add_argument("--check", action="store_true", help="exit nonzero if any acceptance check fails")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
