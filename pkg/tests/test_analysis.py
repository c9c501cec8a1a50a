import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpebench.analysis import (
    analytic_distribution,
    best_dyadic_probability,
    counts_to_index_distribution,
    distribution_over_bitstrings,
    estimate,
    fci_energy,
    kernel_distribution,
    precision_bits,
    reference_energy,
    total_variation,
)
from qpebench.hamiltonian import PauliString, PauliSum, preset_h2
from qpebench.phases import decode_phase, encode_index
from qpebench.qpe import EvolutionSpec, QpeSpec, build_qpe
from qpebench.simulator import Counts, run

from .conftest import H2_X, H2_Z

# lowest eigenvalue of the one-qubit H2 model and Trotterised references
# for n = 1, 10, 100, 1000, 10000 steps (mpmath, 40 digits)
E_FCI = -1.2090863898223095656
E_TROTTER = {
    1: -1.2518594567761047329,
    10: -1.2085294517746335505,
    100: -1.2090808749059388382,
    1000: -1.2090863346785221993,
    10000: -1.2090863892708722295,
}


def h2_spec(k: int, n: int = 1, **kw) -> QpeSpec:
    return QpeSpec(EvolutionSpec(preset_h2(), n_trotter=n), k, **kw)


@mp.workdps(40)
def mp_trotter_energy(n: int):
    # exp(i a X) exp(i b Z) has eigenphases +-acos(cos a cos b)
    t = mp.mpf("0.5")
    a, b = 2 * mp.pi * t * mp.mpf(H2_X) / n, 2 * mp.pi * t * mp.mpf(H2_Z) / n
    theta = mp.acos(mp.cos(a) * mp.cos(b))
    target = 2 * mp.pi * t * abs(mp.mpf(E_FCI)) / n
    theta = min((theta, 2 * mp.pi - theta), key=lambda v: abs(v - target))
    return -(n / (2 * mp.pi * t)) * theta


# ------------------------------------------------------------ estimates from counts


def test_estimate_example():
    spec = QpeSpec(EvolutionSpec(PauliSum(1, ((PauliString("Z"), 0.75),))), 2, "1", 0.0)
    e = estimate(Counts({"00": 150, "01": 50}, 200), spec)
    assert e.bitstring == "00" and e.p_max == 0.75 and e.p_top3 == 1.0
    assert e.phase == 0.0 and not e.tie
    assert e.bound == 1.0


def test_estimate_uniform_counts():
    k = 8
    hist = {encode_index(m, k): 1 for m in range(200)}
    e = estimate(Counts(hist, 200), h2_spec(k))
    assert e.p_max == 1 / 200 and e.p_top3 == 3 / 200
    assert e.tie and e.bitstring == "00000000"


def test_estimate_two_peaks():
    spec = h2_spec(4)
    e = estimate(Counts({"0110": 95, "1110": 105}, 200), spec)
    assert e.bitstring == "1110" and e.p_max == 0.525
    assert e.phase == decode_phase("1110") == 7 / 16


def test_estimate_respects_window_override():
    spec = h2_spec(3)
    counts = Counts({"001": 10}, 10)
    a = estimate(counts, spec, window_center=0.0)
    b = estimate(counts, spec, window_center=2.0)
    assert b.energy - a.energy == pytest.approx(2.0)


def test_empty_counts_rejected():
    with pytest.raises(ValueError):
        estimate(Counts({}, 0), h2_spec(3))


# ------------------------------------------------------------ analytic distribution


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=4), st.integers(1, 12), st.data())
def test_kernel_is_a_distribution(phases, k, data):
    w = np.array(data.draw(st.lists(st.floats(0.01, 1), min_size=len(phases), max_size=len(phases))))
    probs = kernel_distribution(phases, w / w.sum(), k)
    assert probs.min() >= -1e-15
    assert probs.sum() == pytest.approx(1.0, abs=1e-10)


@given(st.integers(1, 12).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, 2**k - 1))))
def test_dyadic_phase_gives_point_mass(km):
    k, m = km
    probs = kernel_distribution([m / 2**k], [1.0], k)
    assert probs[m] == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 14), st.integers(-3, 3))
def test_kernel_invariant_under_whole_turns(phi, k, shift):
    np.testing.assert_allclose(
        kernel_distribution([phi], [1.0], k), kernel_distribution([phi + shift], [1.0], k), atol=1e-9
    )


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 20))
def test_best_dyadic_probability_floor(phi, k):
    assert best_dyadic_probability(phi, k) >= 4 / math.pi**2 - 1e-12


def test_zero_hamiltonian_reads_zero():
    spec = QpeSpec(EvolutionSpec(PauliSum(2, ((PauliString("ZZ"), 0.0),))), 5, "01", 0.0)
    probs = analytic_distribution(spec)
    assert probs[0] == pytest.approx(1.0)
    assert run(build_qpe(spec), None, 100, 0).histogram == {"00000": 100}


def test_analytic_limits():
    with pytest.raises(ValueError):
        kernel_distribution([0.1], [1.0], 0)
    with pytest.raises(ValueError):
        kernel_distribution([0.1], [1.0], 25)


def test_distribution_helpers():
    probs = np.array([0.5, 0.0, 0.25, 0.25])
    d = distribution_over_bitstrings(probs, 2)
    assert d == {"00": 0.5, "01": 0.25, "11": 0.25}
    counts = Counts({"00": 2, "01": 1, "11": 1}, 4)
    np.testing.assert_allclose(counts_to_index_distribution(counts, 2), probs)
    assert total_variation(probs, probs) == 0
    assert total_variation([1, 0], [0, 1]) == 1


@pytest.mark.parametrize("k", [3, 6, 9])
def test_sampler_matches_analytic_distribution(k):
    spec = h2_spec(k)
    counts = run(build_qpe(spec), None, 100_000, k)
    assert total_variation(counts_to_index_distribution(counts, k), analytic_distribution(spec)) <= 0.02


def test_p_max_converges_to_analytic():
    spec = h2_spec(8)
    expected = analytic_distribution(spec).max()
    tops = [estimate(run(build_qpe(spec), None, 2000, s), spec).p_max for s in range(5)]
    assert abs(float(np.mean(tops)) - expected) <= 0.02


# ------------------------------------------------------------ references and precision


def test_precision_bits():
    assert precision_bits(1.0, 1.25) == 2
    assert precision_bits(0.5, 0.5) == math.inf
    assert precision_bits(0.0, 2**-20) == 20


def test_fci_energy_matches_closed_form():
    assert fci_energy(h2_spec(4)) == pytest.approx(E_FCI, abs=1e-15)
    assert fci_energy(h2_spec(4)) == pytest.approx(-math.hypot(H2_X, H2_Z), abs=1e-15)


@pytest.mark.parametrize("n", sorted(E_TROTTER))
def test_trotter_reference_energies(n):
    assert float(mp_trotter_energy(n)) == pytest.approx(E_TROTTER[n], abs=1e-15)
    assert reference_energy(h2_spec(4, n)) == pytest.approx(E_TROTTER[n], abs=1e-11)


def test_trotter_error_is_second_order():
    errs = [abs(E_TROTTER[n] - E_FCI) for n in (10, 100, 1000, 10000)]
    for a, b in zip(errs, errs[1:]):
        assert 90 <= a / b <= 110


def test_reference_prefers_dominant_eigenstate():
    h = PauliSum(1, ((PauliString("Z"), 0.3),))
    # |1> is the -0.3 eigenstate, |0> the +0.3 one
    up = QpeSpec(EvolutionSpec(h), 6, "0", 0.0)
    down = QpeSpec(EvolutionSpec(h), 6, "1", 0.0)
    assert reference_energy(up) == pytest.approx(0.3)
    assert reference_energy(down) == pytest.approx(-0.3)
    even = QpeSpec(EvolutionSpec(h), 6, (1 / math.sqrt(2), 1 / math.sqrt(2)), 0.0)
    assert reference_energy(even) == pytest.approx(-0.3)


def test_sixteen_readout_qubits_reach_fourteen_bits():
    spec = h2_spec(16)
    e = estimate(run(build_qpe(spec), None, 200, 0), spec)
    assert precision_bits(e.energy, reference_energy(spec)) >= 14
