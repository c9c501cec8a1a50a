import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpebench.ddmath import DD, angle_to_turns, dd_add, dd_mul, double_turns, frac, turns_to_angle, two_prod, two_sum
from qpebench.phases import (
    decode_index,
    decode_phase,
    encode_index,
    energy_to_phase,
    on_window_edge,
    phase_bound,
    phase_to_energy,
    theoretical_bound,
)

mp.mp.prec = 200


def mp_value(x: DD):
    return mp.mpf(x.hi) + mp.mpf(x.lo)


def mod_dist(a, b, period=1):
    d = (a - b) % period
    return min(d, period - d)


# ------------------------------------------------------------ double-double


# the product is exact only while it stays clear of underflow
normal = st.floats(-1e6, 1e6).filter(lambda v: v == 0 or abs(v) > 1e-100)


@given(normal, normal)
def test_error_free_transforms(a, b):
    s = two_sum(a, b)
    assert mp_value(s) == mp.mpf(a) + mp.mpf(b)
    p = two_prod(a, b)
    assert mp_value(p) == mp.mpf(a) * mp.mpf(b)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_dd_arithmetic_accuracy(a, b):
    x, y = dd_add(DD(a), DD(1e-20)), DD(b)
    assert abs(mp_value(dd_add(x, y)) - (mp_value(x) + mp_value(y))) <= 1e-28 * (1 + abs(a) + abs(b))
    assert abs(mp_value(dd_mul(x, y)) - mp_value(x) * mp_value(y)) <= 1e-28 * (1 + abs(a * b))


@given(st.floats(-50, 50))
def test_frac_range(v):
    f = frac(dd_add(DD(v), DD(v * 1e-17)))
    # hi may round to 1 when the value sits just below it
    assert 0 <= f.hi <= 1
    assert f.hi < 1 or f.lo < 0
    assert f.hi > 0 or f.lo >= 0


@given(st.floats(-1e3, 1e3, allow_subnormal=False), st.integers(0, 60))
def test_scaled_reduction_matches_extended_precision(theta, i):
    ours = turns_to_angle(angle_to_turns(theta, i))
    ref = (mp.mpf(theta) * mp.mpf(2) ** i) % (2 * mp.pi)
    assert mod_dist(mp.mpf(ours), ref, 2 * mp.pi) <= 1e-15


@given(st.floats(-4, 4, allow_subnormal=False), st.integers(0, 40))
def test_repeated_doubling_is_exact(theta, i):
    x = angle_to_turns(theta)
    assert mod_dist(mp_value(double_turns(x, i)), mp_value(x) * 2**i) <= 2**-100


def test_negative_doubling_count_rejected():
    with pytest.raises(ValueError):
        double_turns(DD(0.1), -1)
    with pytest.raises(ValueError):
        angle_to_turns(0.1, -1)


# ------------------------------------------------------------ decoding


def test_decode_examples():
    assert decode_phase("0000") == 0.0
    # readout qubit 0 carries the least significant phase bit
    assert decode_phase("1000", 4) == 1 / 16
    assert decode_phase("0001", 4) == 1 / 2
    assert decode_phase("101", 3) == 5 / 8


def test_decode_k3_bijection():
    phases = {decode_phase(format(m, "03b"), 3) for m in range(8)}
    assert phases == {m / 8 for m in range(8)}


@pytest.mark.parametrize("bits, k", [("010", 4), ("", None), ("012", 3)])
def test_decode_errors(bits, k):
    with pytest.raises(ValueError):
        decode_phase(bits, k)


@given(st.integers(1, 20).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, 2**k - 1))))
def test_encode_decode_inverse(km):
    k, m = km
    bits = encode_index(m, k)
    assert len(bits) == k and decode_index(bits, k) == m
    assert decode_phase(bits, k) == m / 2**k


# ------------------------------------------------------------ energies


def test_phase_to_energy_examples():
    assert phase_to_energy(0.0, 0.5, 0.3, offset=0.3) == 0.3
    assert phase_to_energy(0.3955, 0.5, -1.2) == pytest.approx(-1.209)
    assert phase_to_energy(0.6045, 0.5, 1.2) == pytest.approx(1.209)


@given(
    st.floats(0.1, 4),
    st.floats(-5, 5),
    st.floats(-3, 3),
    st.floats(-0.49, 0.49),
)
def test_energy_round_trip_within_window(t, center, offset, frac_pos):
    energy = center + frac_pos / t
    phase = energy_to_phase(energy, t, offset)
    assert 0 <= phase < 1
    assert phase_to_energy(phase, t, center, offset) == pytest.approx(energy, abs=1e-9)


@given(st.floats(0, 1, exclude_max=True), st.floats(0.1, 4), st.floats(-5, 5))
def test_energy_lies_in_window(phase, t, center):
    e = phase_to_energy(phase, t, center)
    assert center - 0.5 / t - 1e-12 <= e < center + 0.5 / t + 1e-12


def test_window_edge_flag():
    assert on_window_edge(-1.0, 0.5, 0.0)
    assert not on_window_edge(-0.5, 0.5, 0.0)


def test_bounds():
    assert theoretical_bound(4, 0.5) == 0.25
    assert theoretical_bound(52, 0.5) == 2.0**-50
    assert theoretical_bound(52, 0.5) == pytest.approx(8.88e-16, rel=1e-3)
    assert theoretical_bound(2, 1.0) == 0.5
    assert phase_bound(3) == 0.25
    with pytest.raises(ValueError):
        phase_bound(1)
    with pytest.raises(ValueError):
        theoretical_bound(4, 0)
    assert math.isclose(theoretical_bound(10, 0.25), 2**-9 / 0.25)
