"""Statevector sampling with stochastic Pauli noise trajectories.

Randomness is split so that results do not depend on how trajectories are
scheduled and so that runs at different noise strengths are coupled:

* shot ``t`` picks its outcome with uniform ``t`` of one dedicated stream;
* trajectory ``t`` draws its error uniforms from its own child stream
  ``SeedSequence(seed, spawn_key=(1, t))``, one uniform per error
  location whatever the probabilities are.

Raising the noise therefore only adds errors to each trajectory, and a
model with every probability at zero reproduces the noiseless counts
exactly.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate, schedule

MAX_QUBITS = 26
CHECKPOINT_BYTES = 256 * 2**20
NORM_ATOL = 1e-10

CHANNELS = ("p1", "p2", "mem", "meas")


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    """Per-channel error probabilities plus multiplicative scales.

    ``scale_global`` multiplies every channel; ``scale_p2`` and
    ``scale_mem`` additionally multiply the two-qubit and idle channels.
    """

    p2: float = 1e-3
    p1: float = 5e-5
    p_meas: float = 1e-3
    p_mem: float = 2e-4
    scale_global: float = 1.0
    scale_p2: float = 1.0
    scale_mem: float = 1.0

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise SimulationError(f"{name} must be a finite non-negative number")
            object.__setattr__(self, name, float(value))

    @property
    def effective(self) -> dict[str, float]:
        g = self.scale_global
        return {
            "p1": min(1.0, self.p1 * g),
            "p2": min(1.0, self.p2 * g * self.scale_p2),
            "p_meas": min(1.0, self.p_meas * g),
            "p_mem": min(1.0, self.p_mem * g * self.scale_mem),
        }

    @property
    def is_noiseless(self) -> bool:
        return not any(self.effective.values())

    def to_dict(self) -> dict:
        return {**asdict(self), "effective": self.effective}

    @classmethod
    def from_dict(cls, data: Mapping) -> "NoiseModel":
        fields = cls.__dataclass_fields__
        unknown = set(data) - set(fields) - {"effective"}
        if unknown:
            raise SimulationError(f"unknown noise fields {sorted(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in fields})


NOISELESS = NoiseModel(0.0, 0.0, 0.0, 0.0)


def scale_noise(
    base: NoiseModel, global_: float = 1.0, p2_only: float = 1.0, mem_only: float = 1.0
) -> NoiseModel:
    """New model with the three scale factors multiplied in."""
    for name, f in (("global", global_), ("p2_only", p2_only), ("mem_only", mem_only)):
        if not f >= 0:
            raise SimulationError(f"scale factor {name} must be non-negative, got {f}")
    return replace(
        base,
        scale_global=base.scale_global * global_,
        scale_p2=base.scale_p2 * p2_only,
        scale_mem=base.scale_mem * mem_only,
    )


@dataclass(frozen=True)
class Counts:
    """Histogram over measured bits; the leftmost bit is the lowest measured qubit."""

    histogram: Mapping[str, int]
    shots: int
    seed: int | None = None
    noise: Mapping | None = None
    injected: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        hist = {k: int(v) for k, v in sorted(self.histogram.items()) if v}
        if sum(hist.values()) != self.shots:
            raise SimulationError("histogram does not sum to shots")
        object.__setattr__(self, "histogram", hist)

    def probabilities(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.histogram.items()}

    def most_common(self, n: int | None = None) -> list[tuple[str, int]]:
        """Descending count, ties broken by the smaller bitstring."""
        ranked = sorted(self.histogram.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked if n is None else ranked[:n]

    def to_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "noise": self.noise,
            "histogram": dict(self.histogram),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Counts":
        d = json.loads(text)
        return cls(d["histogram"], int(d["shots"]), d.get("seed"), d.get("noise"))


# ---------------------------------------------------------------- kernels


def _split(psi: np.ndarray, q: int, n: int) -> np.ndarray:
    return psi.reshape(2**q, 2, 2 ** (n - q - 1))


def _apply_1q(psi: np.ndarray, m: np.ndarray, q: int, n: int) -> None:
    v = _split(psi, q, n)
    a, b = v[:, 0, :].copy(), v[:, 1, :]
    v[:, 0, :] = m[0, 0] * a + m[0, 1] * b
    v[:, 1, :] = m[1, 0] * a + m[1, 1] * b


def _pair_view(psi: np.ndarray, a: int, b: int, n: int) -> tuple[np.ndarray, tuple, tuple]:
    """5-d view with qubits ``a`` and ``b`` as axes, plus index helpers."""
    lo, hi = min(a, b), max(a, b)
    v = psi.reshape(2**lo, 2, 2 ** (hi - lo - 1), 2, 2 ** (n - hi - 1))

    def at(bit_a: int, bit_b: int) -> tuple:
        bits = {a: bit_a, b: bit_b}
        return (slice(None), bits[lo], slice(None), bits[hi], slice(None))

    return v, at(1, 0), at(1, 1)


def _apply_gate(psi: np.ndarray, g: Gate, n: int) -> None:
    kind = g.kind
    if kind == "RZ":
        v = _split(psi, g.qubits[0], n)
        v[:, 0, :] *= np.exp(-0.5j * g.angle)
        v[:, 1, :] *= np.exp(0.5j * g.angle)
    elif kind in ("H", "RX", "RY"):
        _apply_1q(psi, g.matrix(), g.qubits[0], n)
    elif kind == "CX":
        v, s10, s11 = _pair_view(psi, g.qubits[0], g.qubits[1], n)
        tmp = v[s10].copy()
        v[s10] = v[s11]
        v[s11] = tmp
    elif kind == "CPHASE":
        v, _, s11 = _pair_view(psi, g.qubits[0], g.qubits[1], n)
        v[s11] *= np.exp(1j * g.angle)
    elif kind != "MEASURE":  # pragma: no cover - Gate validates kinds
        raise SimulationError(f"cannot simulate {kind}")


def _apply_pauli(psi: np.ndarray, pauli: int, q: int, n: int) -> None:
    """Pauli 1=X, 2=Y, 3=Z on qubit ``q`` (global phases dropped)."""
    v = _split(psi, q, n)
    if pauli in (1, 2):
        tmp = v[:, 0, :].copy()
        v[:, 0, :] = v[:, 1, :]
        v[:, 1, :] = tmp
    if pauli in (2, 3):
        # Y = i X Z: after the flip, the amplitude that came from |1> sits at |0>
        v[:, 0 if pauli == 2 else 1, :] *= -1


# ---------------------------------------------------------------- noise layout


@dataclass(frozen=True)
class _Locations:
    """Error locations in a fixed order, each tied to a gate-list position.

    An error at position ``p`` acts just before gate ``p`` (or at the end).
    """

    position: np.ndarray
    channel: np.ndarray  # index into CHANNELS[:3]
    qubit_a: np.ndarray
    qubit_b: np.ndarray


def _locations(c: Circuit) -> _Locations:
    gates = c.gates
    layers = schedule(gates, c.n_qubits)
    depth = max(layers) + 1 if layers else 0
    busy: dict[tuple[int, int], bool] = {}
    ops_by_qubit: list[list[tuple[int, int]]] = [[] for _ in range(c.n_qubits)]
    end = [depth] * c.n_qubits
    for idx, (g, layer) in enumerate(zip(gates, layers)):
        for q in g.qubits:
            busy[layer, q] = True
            ops_by_qubit[q].append((layer, idx))
        if g.kind == "MEASURE":
            end[g.qubits[0]] = layer

    rows: list[tuple[int, int, int, int, int]] = []  # (position, order, channel, a, b)
    for idx, g in enumerate(gates):
        if g.kind == "MEASURE":
            continue
        if g.is_two_qubit:
            rows.append((idx + 1, 0, 1, g.qubits[0], g.qubits[1]))
        else:
            rows.append((idx + 1, 0, 0, g.qubits[0], -1))
    for q in range(c.n_qubits):
        ops = ops_by_qubit[q]
        cursor = 0
        for layer in range(end[q]):
            if busy.get((layer, q)):
                continue
            while cursor < len(ops) and ops[cursor][0] < layer:
                cursor += 1
            pos = ops[cursor][1] if cursor < len(ops) else len(gates)
            rows.append((pos, 1, 2, q, -1))
    rows.sort()
    arr = np.array(rows, dtype=np.int64).reshape(-1, 5)
    return _Locations(arr[:, 0], arr[:, 2], arr[:, 3], arr[:, 4])


def _flips_basis(g: Gate, q: int) -> bool:
    """Whether ``g`` fails to commute with Z on ``q``."""
    if g.kind in ("RZ", "CPHASE", "MEASURE"):
        return False
    if g.kind == "CX":
        return g.qubits[1] == q
    return True


def expected_errors(c: Circuit, noise: NoiseModel, qubits=None, outcome_relevant: bool = False) -> float:
    """Mean number of injected errors touching ``qubits`` (default: measured qubits).

    With ``outcome_relevant`` a Pauli component counts only if it can change
    what is measured: Z components arriving after a qubit's last
    non-diagonal gate commute with everything left and are dropped.
    """
    qubits = set(c.measured_qubits if qubits is None else qubits)
    loc = _locations(c)
    eff = noise.effective
    probs = np.array([eff["p1"], eff["p2"], eff["p_mem"]])[loc.channel]
    readout_flips = eff["p_meas"] * len(qubits & set(c.measured_qubits))
    if not outcome_relevant:
        touches = np.array([a in qubits or b in qubits for a, b in zip(loc.qubit_a, loc.qubit_b)])
        return float(probs[touches].sum() + readout_flips)

    last = {q: -1 for q in qubits}
    for idx, g in enumerate(c.gates):
        for q in g.qubits:
            if q in last and _flips_basis(g, q):
                last[q] = idx

    def harmful(pauli: int, q: int, pos: int) -> bool:
        if q not in qubits or pauli == 0:
            return False
        return pos <= last[q] or pauli in (1, 2)

    total = readout_flips
    for p, ch, a, b, pos in zip(probs, loc.channel, loc.qubit_a, loc.qubit_b, loc.position):
        if ch == 2:
            total += p * harmful(3, a, pos)
        elif ch == 0:
            total += p * sum(harmful(x, a, pos) for x in (1, 2, 3)) / 3
        else:
            hits = sum(harmful(x, a, pos) or harmful(y, b, pos) for x in range(4) for y in range(4) if x or y)
            total += p * hits / 15
    return float(total)


# ---------------------------------------------------------------- runner


class _Sampler:
    def __init__(self, c: Circuit, check_norm: bool = False):
        if c.n_qubits > MAX_QUBITS:
            raise SimulationError(f"statevector guard: {c.n_qubits} > {MAX_QUBITS} qubits")
        self.circuit = c
        self.n = c.n_qubits
        self.gates = [g for g in c.gates if g.kind != "MEASURE"]
        self.all_gates = c.gates
        self.measured = c.measured_qubits or list(range(self.n))
        self.check_norm = check_norm
        dim_bytes = 16 * 2**self.n
        self.stride = max(1, math.ceil(len(c.gates) * dim_bytes / CHECKPOINT_BYTES))
        self.checkpoints: dict[int, np.ndarray] = {}
        psi = self._zero()
        for idx, g in enumerate(c.gates):
            if idx % self.stride == 0:
                self.checkpoints[idx] = psi.copy()
            _apply_gate(psi, g, self.n)
            self._check(psi)
        self.ideal_cdf = self._cdf(psi)

    def _zero(self) -> np.ndarray:
        psi = np.zeros(2**self.n, dtype=complex)
        psi[0] = 1.0
        return psi

    def _check(self, psi: np.ndarray) -> None:
        if self.check_norm:
            norm = np.linalg.norm(psi)
            if abs(norm - 1.0) > NORM_ATOL:
                raise SimulationError(f"norm drifted to {norm!r}")

    def _cdf(self, psi: np.ndarray) -> np.ndarray:
        probs = (np.abs(psi) ** 2).reshape((2,) * self.n)
        others = tuple(q for q in range(self.n) if q not in self.measured)
        marginal = probs.sum(axis=others) if others else probs
        order = sorted(self.measured)
        marginal = np.moveaxis(marginal, [order.index(q) for q in self.measured], range(len(order)))
        return np.cumsum(marginal.ravel())

    def pick(self, cdf: np.ndarray, u: float) -> int:
        idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
        return min(idx, len(cdf) - 1)

    def noisy_cdf(self, errors: list[tuple[int, int, int, int]]) -> np.ndarray:
        """Run with Pauli ``errors`` = (position, pauli_a, qubit_a, ...) inserted."""
        if self.checkpoints:
            start = min(errors[0][0], len(self.all_gates) - 1) // self.stride * self.stride
            psi = self.checkpoints[start].copy()
        else:
            start, psi = 0, self._zero()
        e = 0
        for idx in range(start, len(self.all_gates) + 1):
            while e < len(errors) and errors[e][0] == idx:
                _, pauli, q, pauli_b, qb = errors[e]
                if pauli:
                    _apply_pauli(psi, pauli, q, self.n)
                if pauli_b:
                    _apply_pauli(psi, pauli_b, qb, self.n)
                e += 1
            if idx < len(self.all_gates):
                _apply_gate(psi, self.all_gates[idx], self.n)
                self._check(psi)
        return self._cdf(psi)


def _trajectory_rng(seed: int, t: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, t)))


def _outcome_uniforms(seed: int, shots: int) -> np.ndarray:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,))).random(shots)


def _bits(index: int, width: int) -> str:
    return format(index, f"0{width}b")


def run(
    c: Circuit,
    noise: NoiseModel | None = None,
    shots: int = 200,
    seed: int = 0,
    workers: int = 1,
    check_norm: bool = False,
) -> Counts:
    if shots < 1:
        raise SimulationError("shots must be at least 1")
    if c.n_qubits > MAX_QUBITS:
        raise SimulationError(f"statevector guard: {c.n_qubits} > {MAX_QUBITS} qubits")
    sampler = _Sampler(c, check_norm)
    width = len(sampler.measured)
    u_out = _outcome_uniforms(seed, shots)
    injected = dict.fromkeys(CHANNELS, 0)

    if noise is None:
        hist: dict[str, int] = {}
        idx = np.minimum(
            np.searchsorted(sampler.ideal_cdf, u_out * sampler.ideal_cdf[-1], side="right"),
            len(sampler.ideal_cdf) - 1,
        )
        for i, n in zip(*np.unique(idx, return_counts=True)):
            hist[_bits(int(i), width)] = int(n)
        return Counts(hist, shots, seed, None, injected)

    loc = _locations(c)
    eff = noise.effective
    probs = np.array([eff["p1"], eff["p2"], eff["p_mem"]])[loc.channel]

    def one(t: int) -> tuple[str, dict[str, int]]:
        rng = _trajectory_rng(seed, t)
        u_err = rng.random(len(probs))
        u_pauli = rng.random(len(probs))
        u_flip = rng.random(width)
        hits = np.nonzero(u_err < probs)[0]
        tally = dict.fromkeys(CHANNELS, 0)
        if hits.size:
            errors = []
            for h in hits:
                ch = int(loc.channel[h])
                tally[CHANNELS[ch]] += 1
                if ch == 1:
                    code = 1 + int(u_pauli[h] * 15)
                    pos, a, b = int(loc.position[h]), int(loc.qubit_a[h]), int(loc.qubit_b[h])
                    errors.append((pos, code // 4, a, code % 4, b))
                else:
                    pauli = 3 if ch == 2 else 1 + int(u_pauli[h] * 3)
                    errors.append((int(loc.position[h]), pauli, int(loc.qubit_a[h]), 0, -1))
            outcome = sampler.pick(sampler.noisy_cdf(errors), u_out[t])
        else:
            outcome = sampler.pick(sampler.ideal_cdf, u_out[t])
        flips = u_flip < eff["p_meas"]
        tally["meas"] = int(flips.sum())
        bits = _bits(outcome, width)
        if tally["meas"]:
            bits = "".join(str(int(b) ^ int(f)) for b, f in zip(bits, flips))
        return bits, tally

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(shots)))
    else:
        results = [one(t) for t in range(shots)]

    hist = {}
    for bits, tally in results:
        hist[bits] = hist.get(bits, 0) + 1
        for k, v in tally.items():
            injected[k] += v
    return Counts(hist, shots, seed, noise.to_dict(), injected)
