import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dynamide import fields as fl
from dynamide.constants import SpringParams, charge_frequency, make_constants
from dynamide.verify import field_identity_errors, quasi_mode_set

vec = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False))


def single(k, q=(0.0, 0.0, 1.0), pol=(1.0, 0.0, 0.0), alpha=0.5, n=0, **kw):
    return fl.ModeSet((fl.FieldMode.along(q, pol, k.c, alpha, n),), k, **kw)


def test_mode_validation(k):
    with pytest.raises(ValueError, match="transverse"):
        fl.FieldMode.along([0, 0, 1], [0, 0, 1], k.c)
    with pytest.raises(ValueError, match="unit"):
        fl.FieldMode.along([0, 0, 1], [2, 0, 0], k.c)
    with pytest.raises(ValueError, match="non-negative"):
        fl.FieldMode.along([0, 0, 1], [1, 0, 0], k.c, n=-1)
    with pytest.raises(ValueError, match="C \\|q\\|"):
        fl.ModeSet((fl.FieldMode([0, 0, 1], [1, 0, 0], 2.0),), k)
    m = fl.FieldMode.along([0, 0, 1], [1, 0, 0], k.c)
    with pytest.raises(ValueError, match="duplicate"):
        fl.ModeSet((m, m), k)
    # same q with the other polarization is a distinct mode
    fl.ModeSet((m, fl.FieldMode.along([0, 0, 1], [0, 1, 0], k.c)), k)


def test_volume(k):
    ms = single(k, cell_volume=0.25, n_cells=8)
    assert ms.volume == 2.0


def test_zero_amplitude_gives_zero_fields(k):
    ms = single(k, alpha=0.0)
    for fn in (fl.displacement_field, fl.polarization_field, fl.electric_field, fl.vector_potential,
               fl.magnetic_field, fl.poynting_momentum_density):
        assert not fn(ms, [0.3, 0.1, 2.0], 1.7).any()


def test_empty_mode_set(k):
    ms = fl.ModeSet((), k)
    assert not fl.electric_field(ms, np.zeros(3), 0.0).any()
    assert not fl.mode_momentum_expectation(ms).any()


def test_displacement_substitution(k):
    kk = make_constants(theta=2.0)
    ms = single(kk, q=(0, 0, 3.0), alpha=0.7, n_cells=4)
    u = fl.displacement_field(ms, np.zeros(3), 0.0)
    expect = 2 * 0.7 / math.sqrt(4) * math.sqrt(1.0 / (2 * 2.0 * 3.0))
    np.testing.assert_allclose(u, [expect, 0, 0], rtol=1e-15)
    later = fl.displacement_field(ms, np.zeros(3), 2 * math.pi / 3.0)
    np.testing.assert_allclose(later, u, rtol=1e-12)


def test_polarization_is_scaled_displacement(k):
    ms = quasi_mode_set(6, k, cell_volume=0.3, n_cells=5)
    for r, t in [([0.1, 0.2, 0.3], 0.0), ([1.0, -2.0, 0.5], 3.3)]:
        np.testing.assert_array_equal(fl.polarization_field(ms, r, t), (2 * k.e / 0.3) * fl.displacement_field(ms, r, t))


def test_electric_field_substitution(k):
    ms = single(k, q=(0, 0, 1.0), alpha=0.5)
    np.testing.assert_allclose(fl.electric_field(ms, np.zeros(3), 0.0), [math.sqrt(8 * math.pi**2), 0, 0], rtol=1e-15)


def test_e_equals_p_over_eps0_at_charge_frequency():
    # choose theta so that the single mode frequency satisfies theta w^2 = e^2 / (pi V0 eps0)
    k0 = make_constants()
    v0, w = 0.7, 1.3
    theta = k0.e**2 / (math.pi * v0 * k0.eps0 * w**2)
    kk = make_constants(theta=theta)
    assert charge_frequency(SpringParams(0, 0, theta, cell_volume=v0), kk) == pytest.approx(w, rel=1e-14)
    ms = single(kk, q=(0, w, 0), pol=(0, 0, 1), alpha=0.3 - 0.4j, cell_volume=v0, n_cells=3)
    r, t = [0.2, -0.1, 0.4], 0.9
    np.testing.assert_allclose(fl.electric_field(ms, r, t), fl.polarization_field(ms, r, t) / kk.eps0, rtol=1e-13)


def test_prefactor_forms_agree(k, k_si):
    for kk in (k, k_si):
        ms = quasi_mode_set(8, kk, cell_volume=1.7, n_cells=2)
        g1, g2 = fl.vector_potential_prefactors(ms)
        np.testing.assert_allclose(g1 / g2, 1.0, rtol=1e-12)
        r = [0.3, 0.2, -0.4]
        np.testing.assert_allclose(fl.vector_potential(ms, r, 0.4), fl.vector_potential_g2(ms, r, 0.4), rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_field_identities_random_sets(seed):
    k = make_constants()
    rng = np.random.default_rng(seed)
    ms = fl.random_mode_set(rng, int(rng.integers(1, 9)), k, cell_volume=1.3, n_cells=2)
    e_rel, h_rel = field_identity_errors(ms)
    assert e_rel <= 1e-6
    assert h_rel <= 1e-6


def test_field_identities_si(k_si):
    ms = quasi_mode_set(8, k_si)
    e_rel, h_rel = field_identity_errors(ms)
    assert e_rel <= 1e-6 and h_rel <= 1e-6


def test_single_mode_geometry(k):
    q = np.array([1.0, 2.0, -0.5])
    pol = np.cross(q, [0, 0, 1.0])
    pol /= np.linalg.norm(pol)
    ms = single(k, q=q, pol=pol, alpha=0.3 + 0.2j)
    r, t = [0.1, 0.4, 0.3], 0.25
    e, h = fl.electric_field(ms, r, t), fl.magnetic_field(ms, r, t)
    assert abs(h @ pol) <= 1e-14 * np.linalg.norm(h)
    assert abs(h @ q) <= 1e-14 * np.linalg.norm(h) * np.linalg.norm(q)
    assert abs(e @ h) <= 1e-14 * np.linalg.norm(e) * np.linalg.norm(h)
    s = fl.poynting_momentum_density(ms, r, t)
    np.testing.assert_allclose(s / np.linalg.norm(s), q / np.linalg.norm(q), atol=1e-14)


def test_poynting_time_average(k):
    alpha = 0.6 - 0.3j
    ms = single(k, q=(0, 0, 2.0), alpha=alpha, cell_volume=1.5)
    w = 2.0
    ts = np.arange(64) * (2 * math.pi / w) / 64
    avg = np.mean([fl.poynting_momentum_density(ms, [0.2, 0.1, 0.3], t) for t in ts], axis=0)
    expect = abs(alpha) ** 2 * k.hbar * w / (ms.volume * k.c)
    np.testing.assert_allclose(avg, [0, 0, expect], rtol=1e-13, atol=1e-15)


@given(v=vec, n=vec, i=vec)
def test_triple_product_bac_cab(v, n, i):
    scale = max(1.0, np.linalg.norm(v) * np.linalg.norm(n) * np.linalg.norm(i))
    np.testing.assert_allclose(fl.triple_product(v, n, i), np.cross(v, np.cross(n, i)), atol=1e-12 * scale)


def test_triple_product_special_cases():
    n = np.array([0, 0, 1.0])
    i = np.array([1.0, 0, 0])
    np.testing.assert_array_equal(fl.triple_product(3 * n, n, i), -3 * i)
    np.testing.assert_array_equal(fl.triple_product(2 * i, n, i), 2 * n)


def test_lorentz_force(k):
    ms = single(k, alpha=0.4)
    r, t = np.zeros(3), 0.0
    h = fl.magnetic_field(ms, r, t)
    assert not fl.lorentz_force_density(ms, np.zeros(3), r, t).any()
    assert not fl.lorentz_force_density(ms, 2.5 * h, r, t).any()
    v = np.array([0, 0, 1.5])  # perpendicular to H = along y
    f = fl.lorentz_force_density(ms, v, r, t)
    assert np.linalg.norm(f) == pytest.approx(k.e / k.c * 1.5 * np.linalg.norm(h), rel=1e-15)


def test_mode_momentum_expectation(k):
    for n in (0, 3):
        ms = single(k, q=(0, 2.0, 0), pol=(1, 0, 0), n=n, cell_volume=0.5, n_cells=3)
        p = fl.mode_momentum_expectation(ms)
        expect = (n + 0.5) * k.hbar * 2.0 / (1.5 * k.c)
        np.testing.assert_allclose(p, [0, expect, 0], rtol=1e-15)
    a = fl.FieldMode.along([0, 0, 1.0], [1, 0, 0], k.c, n=2)
    b = fl.FieldMode.along([0, 0, -1.0], [1, 0, 0], k.c, n=2)
    assert np.all(np.abs(fl.mode_momentum_expectation(fl.ModeSet((a, b), k))) <= 1e-16)


def test_mode_momentum_additive(k):
    ms = quasi_mode_set(8, k)
    halves = [fl.ModeSet(ms.modes[:3], k), fl.ModeSet(ms.modes[3:], k)]
    total = fl.mode_momentum_expectation(ms)
    np.testing.assert_allclose(sum(fl.mode_momentum_expectation(h) for h in halves), total, rtol=1e-14, atol=1e-15)


@given(eps=st.floats(1e-3, 1e3), mu=st.floats(1e-3, 1e3))
def test_phase_velocity(eps, mu):
    k = make_constants()
    assert fl.phase_velocity(eps, mu, k) * math.sqrt(eps * mu) / k.c == pytest.approx(1.0, rel=1e-14)


def test_phase_velocity_values(k):
    assert fl.phase_velocity(1.0, 1.0, k) == k.c
    assert fl.phase_velocity(4.0, 1.0, k) == k.c / 2
    with pytest.raises(ValueError):
        fl.phase_velocity(0.0, 1.0, k)


def test_field_scan_layout(k):
    ms = quasi_mode_set(3, k)
    cols, rows = fl.field_scan(ms, [0.0, 1.0], [[0, 0, 0], [1, 2, 3]], ["S", "E"])
    assert cols == ["t", "r_x", "r_y", "r_z", "E_x", "E_y", "E_z", "S_x", "S_y", "S_z"]
    assert [r[:4] for r in rows] == [[0.0, 0, 0, 0], [0.0, 1, 2, 3], [1.0, 0, 0, 0], [1.0, 1, 2, 3]]
    np.testing.assert_array_equal(rows[1][4:7], fl.electric_field(ms, [1, 2, 3], 0.0))
    with pytest.raises(ValueError):
        fl.field_scan(ms, [0.0], [[0, 0, 0]], ["Q"])


def test_snapshot(k):
    ms = quasi_mode_set(4, k)
    snap = fl.field_snapshot(ms, [0.1, 0.2, 0.3], 0.5)
    np.testing.assert_array_equal(snap.E, fl.electric_field(ms, [0.1, 0.2, 0.3], 0.5))
    assert snap.provenance is ms
    assert all(np.all(np.isfinite(getattr(snap, f))) for f in fl.FIELD_ORDER)
