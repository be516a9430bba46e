import math

import pytest
from hypothesis import given, strategies as st

from dynamide.constants import (
    PhysicalConstants,
    SpringParams,
    UnitSystem,
    charge_frequency,
    charge_wavevector,
    collective_mode_frequency,
    internal_mode_frequency,
    make_constants,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_natural_units(k):
    assert (k.e, k.hbar, k.c, k.m) == (1.0, 1.0, 1.0, 1.0)
    assert k.eps0 == pytest.approx(1.0 / (4.0 * math.pi), rel=0, abs=1e-16)
    assert k.mu0 == pytest.approx(4.0 * math.pi, rel=1e-16)
    assert abs(k.c * math.sqrt(k.eps0 * k.mu0) - 1.0) <= 1e-12
    assert k.system is UnitSystem.NATURAL


def test_si_units(k_si):
    assert k_si.c == 2.99792458e8
    assert k_si.e == 1.602176634e-19
    assert abs(k_si.c * math.sqrt(k_si.eps0 * k_si.mu0) - 1.0) <= 1e-12
    # the derived mu0 agrees with the CODATA value to its quoted digits
    assert k_si.mu0 == pytest.approx(1.25663706212e-6, rel=1e-10)


def test_make_constants_is_deterministic():
    assert make_constants("si") == make_constants(UnitSystem.SI)
    assert make_constants() == make_constants()


def test_constants_validation(k):
    with pytest.raises(ValueError):
        PhysicalConstants(1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0)  # C sqrt(eps0 mu0) != 1
    with pytest.raises(ValueError):
        PhysicalConstants(-1.0, 1.0, 1.0, 1.0, 1.0, k.eps0, k.mu0)
    with pytest.raises(ValueError):
        make_constants("cgs")


def test_friction_time_natural(k):
    assert k.friction_time == pytest.approx(2.0 / 3.0, rel=1e-15)


def test_spring_params_volume():
    p = SpringParams(1.0, 2.0, 1.0, cell_volume=0.5, n_cells=8)
    assert p.total_volume == 4.0
    with pytest.raises(ValueError):
        SpringParams(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        SpringParams(1.0, 1.0, 1.0, n_cells=0)
    with pytest.raises(ValueError):
        SpringParams(-1.0, 1.0, 1.0)


@pytest.mark.parametrize("chi_t,theta,expect", [(1.0, 2.0, 1.0), (0.0, 1.0, 0.0), (2.0, 1.0, 2.0)])
def test_internal_mode_frequency(chi_t, theta, expect):
    assert internal_mode_frequency(SpringParams(0.0, chi_t, theta)) == pytest.approx(expect, rel=1e-15)


def test_collective_mode_frequency():
    assert collective_mode_frequency(SpringParams(1.0, 0.0, 2.0)) == pytest.approx(1.0, rel=1e-15)
    assert collective_mode_frequency(SpringParams(0.0, 1.0, 2.0)) == 0.0


@given(chi_t=positive, theta=positive)
def test_doubling_relation(chi_t, theta):
    p = SpringParams(2.0 * chi_t, chi_t, theta)
    ratio = collective_mode_frequency(p) ** 2 / internal_mode_frequency(p) ** 2
    assert abs(ratio - 2.0) <= 1e-12 * 2.0


def test_charge_frequency_natural(k):
    assert charge_frequency(SpringParams(0.0, 0.0, 1.0, cell_volume=1.0), k) == pytest.approx(2.0, rel=1e-15)
    assert charge_frequency(SpringParams(0.0, 0.0, 1.0, cell_volume=1e12), k) < 1e-5


@given(s=positive, v0=positive, theta=positive)
def test_charge_frequency_homogeneous_in_e(s, v0, theta):
    k = make_constants()
    ks = PhysicalConstants(s * k.e, k.m, k.theta, k.hbar, k.c, k.eps0, k.mu0)
    p = SpringParams(0.0, 0.0, theta, cell_volume=v0)
    assert charge_frequency(p, ks) == pytest.approx(s * charge_frequency(p, k), rel=1e-13)


@given(v0=positive, theta=positive)
def test_charge_wavevector_relation(v0, theta):
    # the two printed forms agree for q = w / (2C); with q = w / C they differ by a factor 4 in q^2
    k = make_constants()
    p = SpringParams(0.0, 0.0, theta, cell_volume=v0)
    w = charge_frequency(p, k)
    q = charge_wavevector(p, k)
    assert q == pytest.approx(w / (2.0 * k.c), rel=1e-12)
    assert (w / k.c) ** 2 / q**2 == pytest.approx(4.0, rel=1e-12)
