"""Sweep configuration, execution and CSV/JSON output.

A sweep visits every ``(k, n_trotter, scale triple, seed)`` point.  Circuits
are built once per ``(k, n_trotter)`` and shared by the points that use
them.  Output rows are sorted, floats are written with ``repr`` and the
only timestamp lives in a sidecar file, so identical configs give
byte-identical CSVs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .analysis import CSV_COLUMNS, estimate, fci_energy, precision_bits, reference_energy
from .circuit import resource_report
from .hamiltonian import (
    PRESETS,
    IntegralTable,
    PauliSum,
    find_z2_symmetries,
    jordan_wigner,
    load_pauli_sum,
    sector_for_state,
    z2_taper,
)
from .qpe import EvolutionSpec, QpeSpec, build_qpe
from .simulator import NOISELESS, NoiseModel, run, scale_noise

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

EXTRA_COLUMNS = (
    "error",
    "error_fci",
    "bits",
    "within_bound",
    "tie",
    "eff_p1",
    "eff_p2",
    "eff_p_meas",
    "eff_p_mem",
    "config_hash",
    "status",
)
RECORD_COLUMNS = CSV_COLUMNS + EXTRA_COLUMNS
RESOURCE_COLUMNS = ("k", "n_trotter", "total_gates", "two_qubit_gates", "depth", "config_hash")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep.  ``hamiltonian`` is one of

    * ``{"preset": "h2"}``
    * ``{"file": "h.json"}`` (Pauli-sum file)
    * ``{"integrals": "ints.json", "taper_state": "1100"}`` (Jordan-Wigner,
      then tapering in the sector of the given basis state)

    ``noise = None`` means noiseless sampling.
    """

    hamiltonian: Mapping[str, Any] = field(default_factory=lambda: {"preset": "h2"})
    t: float = 0.5
    n_trotter: tuple[int, ...] = (1,)
    k: tuple[int, ...] = (4,)
    shots: int = 200
    seeds: tuple[int, ...] = (0,)
    noise: Mapping[str, float] | None = None
    scales_global: tuple[float, ...] = (1.0,)
    scales_p2: tuple[float, ...] = (1.0,)
    scales_mem: tuple[float, ...] = (1.0,)
    initial_state: str | tuple | None = None
    window_center: float | None = None
    term_order: tuple[str, ...] | None = None
    build_only: bool = False
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("n_trotter", "k", "seeds"):
            vals = tuple(int(v) for v in _as_list(getattr(self, name)))
            if not vals:
                raise ConfigError(f"{name} must not be empty")
            object.__setattr__(self, name, vals)
        if min(self.k) < 1 or min(self.n_trotter) < 1:
            raise ConfigError("k and n_trotter entries must be positive")
        for name in ("scales_global", "scales_p2", "scales_mem"):
            vals = tuple(float(v) for v in _as_list(getattr(self, name)))
            if not vals or min(vals) < 0:
                raise ConfigError(f"{name} must be a non-empty list of non-negative numbers")
            object.__setattr__(self, name, vals)
        if int(self.shots) < 1:
            raise ConfigError("shots must be positive")
        if not float(self.t) > 0:
            raise ConfigError("t must be positive")
        object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "hamiltonian", dict(self.hamiltonian))
        if self.noise is not None:
            NoiseModel.from_dict(self.noise)  # validates
            object.__setattr__(self, "noise", dict(self.noise))
        if isinstance(self.initial_state, list):
            object.__setattr__(self, "initial_state", tuple(_complex(a) for a in self.initial_state))
        if self.term_order is not None:
            object.__setattr__(self, "term_order", tuple(self.term_order))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        data = dict(data)
        scales = data.pop("scales", {}) or {}
        for key in ("global", "p2", "mem"):
            if key in scales:
                data[f"scales_{key}"] = scales[key]
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def to_mapping(self) -> dict:
        d = asdict(self)
        if isinstance(self.initial_state, tuple):
            d["initial_state"] = [[a.real, a.imag] for a in self.initial_state]
        return d

    def config_hash(self) -> str:
        """Hash of the settings that affect results (output location excluded)."""
        d = self.to_mapping()
        d.pop("output_dir")
        d.pop("workers")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _complex(a) -> complex:
    if isinstance(a, (list, tuple)):
        return complex(float(a[0]), float(a[1]))
    return complex(a)


def load_config(path) -> ExperimentConfig:
    """TOML or JSON (chosen by suffix); both map onto the same fields."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = tomllib.loads(text)
    cfg = ExperimentConfig.from_mapping(data)
    return _resolve_paths(cfg, path.parent)


def _resolve_paths(cfg: ExperimentConfig, base: Path) -> ExperimentConfig:
    ham = dict(cfg.hamiltonian)
    for key in ("file", "integrals"):
        if key in ham and not os.path.isabs(ham[key]):
            ham[key] = str(base / ham[key])
    return ExperimentConfig(**{**asdict(cfg), "hamiltonian": ham})


def resolve_hamiltonian(source: Mapping[str, Any]) -> PauliSum:
    if "preset" in source:
        name = str(source["preset"]).lower()
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
        return PRESETS[name]()
    if "file" in source:
        return load_pauli_sum(source["file"])
    if "integrals" in source:
        table = IntegralTable.from_json(Path(source["integrals"]).read_text(encoding="utf-8"))
        h = jordan_wigner(table)
        state = source.get("taper_state")
        if state is None:
            return h
        gens = find_z2_symmetries(h)
        return z2_taper(h, sector_for_state(gens, str(state)))
    raise ConfigError("hamiltonian needs one of: preset, file, integrals")


def _fmt(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _point_rows(cfg_map: dict, k: int, n_trotter: int) -> tuple[dict, list[dict]]:
    """Build one circuit and run every scale/seed point that uses it."""
    cfg = ExperimentConfig.from_mapping(cfg_map)
    chash = cfg.config_hash()
    h = resolve_hamiltonian(cfg.hamiltonian)
    spec = QpeSpec(
        EvolutionSpec(h, cfg.t, n_trotter, cfg.term_order),
        k,
        cfg.initial_state,
        cfg.window_center,
    )
    circuit = build_qpe(spec)
    res = resource_report(circuit)
    resource = {"k": k, "n_trotter": n_trotter, **res.to_dict(), "config_hash": chash}
    rows: list[dict] = []
    if cfg.build_only:
        return resource, rows
    center = spec.resolved_window_center()
    e_trot = float(reference_energy(spec, center))
    e_fci = float(fci_energy(spec))
    base = NOISELESS if cfg.noise is None else NoiseModel.from_dict(cfg.noise)
    for g, p2, mem in itertools.product(cfg.scales_global, cfg.scales_p2, cfg.scales_mem):
        model = scale_noise(base, g, p2, mem)
        eff = model.effective
        for seed in cfg.seeds:
            row = {
                "k": k,
                "n_trotter": n_trotter,
                "noise_scale": g,
                "p2_scale": p2,
                "mem_scale": mem,
                "seed": seed,
                "shots": cfg.shots,
                "e_ref_trotter": e_trot,
                "e_ref_fci": e_fci,
                "eff_p1": eff["p1"],
                "eff_p2": eff["p2"],
                "eff_p_meas": eff["p_meas"],
                "eff_p_mem": eff["p_mem"],
                "config_hash": chash,
            }
            try:
                counts = run(circuit, None if cfg.noise is None else model, cfg.shots, seed)
                est = estimate(counts, spec, center)
                err = float(abs(est.energy - e_trot))
                row.update(
                    winner=est.bitstring,
                    phase=est.phase,
                    energy=est.energy,
                    p_max=est.p_max,
                    p_top3=est.p_top3,
                    bound=est.bound,
                    error=err,
                    error_fci=abs(est.energy - e_fci),
                    bits=precision_bits(est.energy, e_trot),
                    within_bound=bool(err <= est.bound),
                    tie=est.tie,
                    status="ok",
                )
            except Exception as exc:  # recorded in-row, the sweep carries on
                row["status"] = f"error: {type(exc).__name__}: {exc}"
            rows.append(row)
    return resource, rows


def _sort_key(row: Mapping) -> tuple:
    return (row["k"], row["n_trotter"], row["noise_scale"], row["p2_scale"], row["mem_scale"], row["seed"])


def run_experiment(cfg: ExperimentConfig) -> tuple[list[dict], list[dict]]:
    """Return ``(records, resources)``, both in deterministic order."""
    cfg_map = cfg.to_mapping()
    tasks = [(k, n) for k in sorted(set(cfg.k)) for n in sorted(set(cfg.n_trotter))]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            futures = [pool.submit(_point_rows, cfg_map, k, n) for k, n in tasks]
            results = [f.result() for f in futures]
    else:
        results = [_point_rows(cfg_map, k, n) for k, n in tasks]
    resources = [r for r, _ in results]
    records = sorted((row for _, rows in results for row in rows), key=_sort_key)
    return records, resources


def _csv_text(rows: Sequence[Mapping], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def write_outputs(cfg: ExperimentConfig, records, resources, out_dir=None) -> Path:
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(_csv_text(records, RECORD_COLUMNS), encoding="utf-8")
    (out / "resources.csv").write_text(_csv_text(resources, RESOURCE_COLUMNS), encoding="utf-8")
    payload = {
        "config_hash": cfg.config_hash(),
        "config": cfg.to_mapping(),
        "noise_defaults": asdict(NoiseModel()),
        "resources": resources,
        "records": [{c: _json_safe(r.get(c)) for c in RECORD_COLUMNS} for r in records],
    }
    (out / "records.json").write_text(json.dumps(payload, indent=1, sort_keys=True), encoding="utf-8")
    meta = {
        "config_hash": cfg.config_hash(),
        "created": datetime.now(timezone.utc).isoformat(),
        "n_records": len(records),
    }
    (out / "metadata.json").write_text(json.dumps(meta, indent=1), encoding="utf-8")
    return out


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, np.generic):
        return v.item()
    return v


# ---------------------------------------------------------------- reporting


def quadratic_fit(ks, values) -> dict:
    """Least-squares ``a + b k + c k**2`` and the straight-line fit for contrast."""
    ks = np.asarray(ks, dtype=float)
    y = np.asarray(values, dtype=float)
    ss_tot = float(((y - y.mean()) ** 2).sum())

    def r2(deg: int) -> tuple[np.ndarray, float]:
        coeffs = np.polynomial.polynomial.polyfit(ks, y, deg)
        resid = y - np.polynomial.polynomial.polyval(ks, coeffs)
        return coeffs, (1.0 - float((resid**2).sum()) / ss_tot) if ss_tot else 1.0

    quad, r2_quad = r2(2)
    _, r2_lin = r2(1)
    return {"a": float(quad[0]), "b": float(quad[1]), "c": float(quad[2]), "r2": r2_quad, "r2_linear": r2_lin}


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def summarize(records: Sequence[Mapping], resources: Sequence[Mapping]) -> dict:
    """Per-figure summary tables from CSV rows (string or typed values)."""
    out: dict[str, Any] = {}
    if resources:
        table = sorted(
            ({c: int(r[c]) for c in ("k", "n_trotter", "total_gates", "two_qubit_gates", "depth")} for r in resources),
            key=lambda r: (r["k"], r["n_trotter"]),
        )
        out["resources"] = table
        ks = [r["k"] for r in table]
        if len(set(ks)) >= 3:
            out["resource_fit"] = {
                key: quadratic_fit(ks, [r[key] for r in table])
                for key in ("total_gates", "two_qubit_gates", "depth")
            }
    ok = [r for r in records if r.get("status") == "ok"]
    if ok:
        groups: dict[tuple, list] = {}
        for r in ok:
            key = (int(r["k"]), int(r["n_trotter"]), float(r["noise_scale"]), float(r["p2_scale"]), float(r["mem_scale"]))
            groups.setdefault(key, []).append(r)
        rows = []
        for key in sorted(groups):
            g = groups[key]
            within = [str(r["within_bound"]) in ("1", "True") for r in g]
            noiseless = all(float(r[c]) == 0 for r in g for c in ("eff_p1", "eff_p2", "eff_p_meas", "eff_p_mem"))
            rows.append(
                {
                    "k": key[0],
                    "n_trotter": key[1],
                    "noise_scale": key[2],
                    "p2_scale": key[3],
                    "mem_scale": key[4],
                    "n": len(g),
                    "noiseless": noiseless,
                    "median_p_max": float(np.median([float(r["p_max"]) for r in g])),
                    "median_p_top3": float(np.median([float(r["p_top3"]) for r in g])),
                    "median_error": float(np.median([float(r["error"]) for r in g])),
                    "median_error_fci": float(np.median([float(r["error_fci"]) for r in g])),
                    "fraction_within_bound": sum(within) / len(g),
                }
            )
        out["points"] = rows
    out["errors"] = sum(1 for r in records if r.get("status") != "ok")
    return out


def check_summary(summary: Mapping) -> list[tuple[str, bool, str]]:
    """Acceptance-tagged checks that apply to whatever the summary contains."""
    checks = []
    fit = summary.get("resource_fit", {}).get("total_gates")
    if fit:
        passed = fit["r2"] >= 0.99 and fit["c"] > 0
        checks.append(("quadratic gate count", passed, f"R2={fit['r2']:.5f} c={fit['c']:.4g}"))
    points = summary.get("points", [])
    noiseless = [p for p in points if p["noiseless"]]
    if noiseless:
        frac = float(np.mean([p["fraction_within_bound"] for p in noiseless]))
        checks.append(("noiseless precision bound", frac >= 0.95, f"within bound {frac:.3f}"))
    by_k: dict[tuple, list] = {}
    for p in points:
        if p["p2_scale"] == 1.0 and p["mem_scale"] == 1.0:
            by_k.setdefault((p["k"], p["n_trotter"]), []).append(p)
    bad = []
    for key, ps in sorted(by_k.items()):
        ps = sorted(ps, key=lambda p: p["noise_scale"])
        if len(ps) > 1:
            med = [p["median_p_max"] for p in ps]
            if any(b > a for a, b in zip(med, med[1:])):
                bad.append(key[0])
    if any(len(ps) > 1 for ps in by_k.values()):
        checks.append(("P_max non-increasing in noise scale", not bad, f"violations at k={bad}"))
    checks.append(("no failed points", summary.get("errors", 0) == 0, f"{summary.get('errors', 0)} failed"))
    return checks
