import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import arm_impedance, ladder_s21_s11, random_reactive_arms
from dsrfilter.errors import DomainError, NonInvertibleError, SingularConversionError, UsageError
from dsrfilter.netcore import (FrequencyGrid, SParams2, abcd_series, abcd_shunt, abcd_shunt_z,
                               abcd_to_s, cascade, db, determinant, flip, identity, phase_deg,
                               s_to_abcd)

I2 = np.eye(2)


def test_series_and_shunt_placement():
    assert np.array_equal(abcd_series(0), I2)
    assert np.array_equal(abcd_shunt(0), I2)
    m = abcd_series(50j)
    assert m[0, 1] == 50j and m[0, 0] == 1 and m[1, 0] == 0 and m[1, 1] == 1
    m = abcd_shunt(0.02j)
    assert m[1, 0] == 0.02j and m[0, 1] == 0


@pytest.mark.parametrize("bad", [np.inf, np.nan, complex(0, np.inf)])
def test_non_finite_rejected(bad):
    with pytest.raises(DomainError):
        abcd_series(bad)
    with pytest.raises(DomainError):
        abcd_shunt(bad)


def test_series_and_shunt_addition():
    z1, z2 = 12 - 3j, 40j
    assert np.allclose(cascade([abcd_series(z1), abcd_series(z2)]), abcd_series(z1 + z2), rtol=0, atol=1e-12)
    y1, y2 = 0.01j, 0.003 - 0.02j
    assert np.allclose(cascade([abcd_shunt(y1), abcd_shunt(y2)]), abcd_shunt(y1 + y2), rtol=0, atol=1e-15)


def test_cascade_identity_and_empty():
    a = abcd_series(10 + 5j) @ abcd_shunt(0.01j)
    assert np.array_equal(cascade([a]), a)
    assert np.allclose(cascade([a, identity()]), a, rtol=1e-15)
    with pytest.raises(UsageError):
        cascade([])


def test_cascade_associative(rng):
    mats = [abcd_series(complex(*rng.normal(size=2)) * 30) @ abcd_shunt(complex(*rng.normal(size=2)) * 0.01)
            for _ in range(3)]
    left = cascade([cascade(mats[:2]), mats[2]])
    right = cascade([mats[0], cascade(mats[1:])])
    assert np.max(np.abs(left - right)) <= 1e-12 * np.max(np.abs(left))


def test_shunt_z_open_and_short():
    assert np.array_equal(abcd_shunt_z(complex(np.inf, 0)), I2)
    short = abcd_shunt_z(0)
    s = abcd_to_s(short)
    assert abs(s.s21) < 1e-15
    assert abs(s.s11 + 1) < 1e-15


def test_matched_thru():
    s = abcd_to_s(identity(), 50)
    assert s.s11 == 0 and s.s21 == 1


def test_series_100_ohm_closed_form():
    s = abcd_to_s(abcd_series(100), 50)
    # S21 = 2 Z0 / (2 Z0 + Z), S11 = Z / (Z + 2 Z0)
    assert s.s21 == pytest.approx(0.5, abs=1e-15)
    assert s.s11 == pytest.approx(0.5, abs=1e-15)
    assert s.s12 == pytest.approx(0.5, abs=1e-15)


def test_shunt_25_ohm_closed_form():
    s = abcd_to_s(abcd_shunt(1 / 25), 50)
    # S21 = 2 Zp / (2 Zp + Z0), S11 = -Z0 / (2 Zp + Z0)
    assert s.s21 == pytest.approx(0.5, abs=1e-15)
    assert s.s11 == pytest.approx(-0.5, abs=1e-15)


def test_singular_and_non_invertible():
    singular = np.array([[1, 0], [0, -1]], dtype=complex)
    with pytest.raises(SingularConversionError):
        abcd_to_s(singular, 50)
    with pytest.raises(NonInvertibleError):
        s_to_abcd(SParams2(np.array([[1, 0], [0, 1]]), 50))
    with pytest.raises(DomainError):
        abcd_to_s(identity(), 0)


def test_round_trip_series_100():
    m = abcd_series(100)
    back = s_to_abcd(abcd_to_s(m, 50))
    assert np.max(np.abs(back - m)) <= 1e-12
    assert np.allclose(s_to_abcd(abcd_to_s(identity())), I2, atol=1e-15)


def _random_network(rng, w):
    arms = random_reactive_arms(rng)
    mats = []
    for kind, shape, L, C in arms:
        z = arm_impedance(shape, L, C, w)
        mats.append(abcd_series(z) if kind == "series" else abcd_shunt(1 / z))
    return arms, cascade(mats)


def test_random_reactive_networks_match_nodal_oracle(rng):
    for _ in range(50):
        w = 2 * np.pi * rng.uniform(0.1e9, 5e9)
        arms, net = _random_network(rng, w)
        oracle_arms = [(k, arm_impedance(shape, L, C, w)) for k, shape, L, C in arms]
        s21, s11 = ladder_s21_s11(oracle_arms)
        s = abcd_to_s(net, 50)
        assert abs(s.s21 - s21) <= 1e-9 * max(1, abs(s21))
        assert abs(s.s11 - s11) <= 1e-9


def test_reciprocity_losslessness_round_trip(rng):
    for _ in range(200):
        w = 2 * np.pi * rng.uniform(0.1e9, 5e9)
        _, net = _random_network(rng, w)
        det = determinant(net)
        scale = max(1.0, np.max(np.abs(net)) ** 2)
        assert abs(det - 1) <= 1e-10 * scale
        s = abcd_to_s(net, 50)
        assert abs(s.s12 - s.s21) <= 1e-10
        assert abs(abs(s.s11) ** 2 + abs(s.s21) ** 2 - 1) <= 1e-9
        back = s_to_abcd(s)
        assert np.max(np.abs(back - net)) <= 1e-10 * max(1.0, np.max(np.abs(net)))


def test_flip_of_symmetric_network():
    half = abcd_series(20j) @ abcd_shunt(0.004j)
    sym = cascade([half, flip(half)])
    assert np.allclose(flip(sym), sym, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=1e4, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False))
def test_abcd_s_round_trip_property(z, y):
    net = abcd_series(z) @ abcd_shunt(y)
    s = abcd_to_s(net, 50)
    if np.any(np.abs(s.s21) < 1e-6):
        return
    back = s_to_abcd(s)
    assert np.max(np.abs(back - net)) <= 1e-9 * max(1.0, np.max(np.abs(net)))


def test_db_and_phase_conventions():
    assert db(0.1) == pytest.approx(-20)
    assert phase_deg(-1 + 0j) == 180.0
    assert phase_deg(-1 - 0j) == 180.0
    assert phase_deg(1j) == pytest.approx(90)


def test_frequency_grid_validation():
    g = FrequencyGrid.linear(1e9, 2e9, 11)
    assert len(g) == 11
    for bad in ([], [1e9, 1e9], [2e9, 1e9], [0.0, 1e9], [-1.0]):
        with pytest.raises((DomainError, UsageError)):
            FrequencyGrid(bad)


def test_vectorized_over_frequency():
    z = np.array([1j, 2j, 3j])
    m = abcd_series(z)
    assert m.shape == (3, 2, 2)
    s = abcd_to_s(m)
    assert s.s21.shape == (3,)
    assert len(s) == 3
