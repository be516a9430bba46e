import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynamide.constants import SpringParams
from dynamide.lattice import (
    ChainState,
    ChainTrajectory,
    LatticeConfig,
    branch_frequencies,
    build_chain,
    chain_momentum,
    dynamical_matrix,
    integrate_chain,
    max_frequency,
    measured_spectrum,
    mode_frequencies,
    spectrum_bin_width,
    total_energy,
    verlet_step,
)

springs = st.floats(min_value=0.1, max_value=10.0)


def chain(chi=2.0, chi_t=1.0, theta=1.0, n=8, spacing=1.0):
    return LatticeConfig(n, SpringParams(chi, chi_t, theta), spacing)


def test_config_validation():
    with pytest.raises(ValueError):
        chain(n=1)
    with pytest.raises(ValueError):
        chain(spacing=0.0)
    with pytest.raises(ValueError):
        LatticeConfig(4, SpringParams(1.0, 1.0, 1.0), boundary="fixed")


def test_build_chain_zero_and_seeds():
    cfg = chain()
    z = build_chain(cfg)
    assert not z.displacements.any() and not z.velocities.any()
    opt = build_chain(cfg, (0.0, 0.3, "optical"))
    np.testing.assert_allclose(opt.displacements[:, 1], 0.15, rtol=1e-14)
    np.testing.assert_allclose(opt.displacements[:, 0], -0.15, rtol=1e-14)
    ac = build_chain(cfg, (0.0, 0.3, "acoustic"))
    np.testing.assert_allclose(ac.displacements, 0.3, rtol=1e-14)


def test_build_chain_rejects_bad_q():
    cfg = chain()
    with pytest.raises(ValueError, match="Brillouin"):
        build_chain(cfg, (4.0, 1.0, "optical"))
    with pytest.raises(ValueError, match="commensurate"):
        build_chain(cfg, (0.3, 1.0, "optical"))
    with pytest.raises(ValueError):
        build_chain(cfg, (0.0, 1.0, "sideways"))


def test_state_is_read_only():
    s = build_chain(chain(), (0.0, 1.0, "optical"))
    with pytest.raises(ValueError):
        s.displacements[0, 0] = 1.0
    with pytest.raises(ValueError):
        ChainState(np.full((2, 2), np.nan), np.zeros((2, 2)))


def test_isolated_dynamide_eigenvalues():
    w2 = np.linalg.eigvalsh(dynamical_matrix(chain(chi=0.0, chi_t=1.5, theta=0.5), 0.0))
    np.testing.assert_allclose(w2, [0.0, 2 * 1.5 / 0.5], atol=1e-14)


@given(chi_t=springs, theta=springs)
def test_optical_doubling(chi_t, theta):
    cfg = chain(chi=2 * chi_t, chi_t=chi_t, theta=theta)
    w2 = np.linalg.eigvalsh(dynamical_matrix(cfg, 0.0))
    iso = 2 * chi_t / theta
    assert abs(w2[1] / iso - 2.0) <= 1e-10


@given(chi=springs, chi_t=springs, theta=springs, m=st.integers(-8, 8))
def test_dynamical_matrix_hermitian(chi, chi_t, theta, m):
    cfg = chain(chi, chi_t, theta, n=16)
    d = dynamical_matrix(cfg, 2 * math.pi * m / 16)
    np.testing.assert_allclose(d, d.conj().T, atol=0)
    assert np.all(np.linalg.eigvalsh(d) >= -1e-12 * np.abs(d).max())


def test_rigid_pair_limit():
    # stiff dynamides: acoustic branch -> chain of mass 2 theta with bond chi/2 between neighbours
    cfg = chain(chi=1.0, chi_t=1e8, theta=1.0, n=16)
    q = 2 * math.pi / 16
    ac, op = branch_frequencies(cfg, q)
    rigid = math.sqrt(2 * cfg.bond * (1 - math.cos(q)) / (2 * cfg.theta))
    assert ac == pytest.approx(rigid, rel=1e-6)
    assert op > 1e4


def test_mode_table_properties():
    cfg = chain(chi=1.3, chi_t=0.7)
    table = mode_frequencies(cfg, 64)
    assert table.row_at(0.0)[1] == 0.0
    assert np.all(np.abs(table.q) <= cfg.zone_edge + 1e-12)
    assert np.all(np.diff(table.q) > 0)
    for q, a, o in table.rows():
        if abs(q) < cfg.zone_edge - 1e-12:
            _, a2, o2 = table.row_at(-q)
            assert a == pytest.approx(a2, rel=1e-12) and o == pytest.approx(o2, rel=1e-12)
    # acoustic branch is linear near q = 0
    small = mode_frequencies(chain(chi=1.3, chi_t=0.7, n=2048), 2048)
    i = int(np.argmin(np.abs(small.q)))
    slope1 = small.omega_acoustic[i + 1] / small.q[i + 1]
    slope2 = small.omega_acoustic[i + 2] / small.q[i + 2]
    assert slope1 == pytest.approx(slope2, rel=1e-4)


def test_flat_optical_branch_without_coupling():
    table = mode_frequencies(chain(chi=0.0, chi_t=2.0, theta=1.0), 32)
    np.testing.assert_allclose(table.omega_optical, 2.0, rtol=1e-14)


def test_verlet_zero_state_and_dt_rule():
    cfg = chain()
    z = build_chain(cfg)
    out = verlet_step(z, cfg, 0.01)
    assert not out.displacements.any() and out.time == pytest.approx(0.01)
    with pytest.raises(ValueError, match="stability"):
        verlet_step(z, cfg, 0.2 / max_frequency(cfg))


def test_energy_quadratic():
    cfg = chain()
    s = build_chain(cfg, (2 * math.pi * 2 / 8, 0.4, "optical"))
    e1 = total_energy(s, cfg)
    e2 = total_energy(ChainState(2 * s.displacements, s.velocities), cfg)
    assert e1 > 0 and e2 == pytest.approx(4 * e1, rel=1e-14)
    assert total_energy(build_chain(cfg), cfg) == 0.0


def test_momentum_conserved():
    cfg = chain(n=12)
    rng = np.random.default_rng(5)
    s = ChainState(rng.normal(size=(12, 2)), rng.normal(size=(12, 2)))
    traj = integrate_chain(s, cfg, 0.05 / max_frequency(cfg), 5000, stride=500)
    p0 = chain_momentum(s, cfg)
    for i in range(len(traj)):
        assert abs(chain_momentum(traj.state(i), cfg) - p0) <= 1e-11 * max(1.0, abs(p0))


def test_energy_drift_and_period():
    cfg = chain()
    w = max_frequency(cfg)
    period = 2 * math.pi / w
    n_per = int(round(period / (1e-3 / w)))
    dt = period / n_per
    seed = build_chain(cfg, (0.0, 1.0, "optical"))
    traj = integrate_chain(seed, cfg, dt, 100_000)
    e = traj.energies
    assert np.max(np.abs(e - e[0])) / e[0] <= 1e-6
    back = traj.displacements[n_per]
    assert np.max(np.abs(back - seed.displacements)) <= 1e-6


def test_energy_drift_at_coarse_step():
    # at dt*w = 0.05 Verlet energy oscillates by ~(w dt)^2/4 but does not drift
    cfg = chain()
    w = max_frequency(cfg)
    period = 2 * math.pi / w
    n_per = int(round(period / (0.05 / w)))
    traj = integrate_chain(build_chain(cfg, (0.0, 1.0, "optical")), cfg, period / n_per, 100_000)
    e = traj.energies
    wobble = np.max(np.abs(e - e[0])) / e[0]
    assert 1e-4 < wobble < (0.05**2) / 4 * 1.1
    drift = abs(e[-n_per - 1:-1].mean() - e[:n_per].mean()) / e[0]
    assert drift <= 1e-6


def test_spectrum_single_and_double_peak():
    cfg = chain(chi=1.0, chi_t=1.0, n=8)
    dt = 0.02 / max_frequency(cfg)
    q1 = math.pi  # zone edge, well separated from the q = 0 line
    s1 = build_chain(cfg, (0.0, 1.0, "optical"))
    s2 = build_chain(cfg, (q1, 0.8, "optical"))
    both = ChainState(s1.displacements + s2.displacements, s1.velocities)
    n = 16384
    traj = integrate_chain(both, cfg, dt, n - 1)
    peaks = measured_spectrum(traj, 0)
    bin_w = spectrum_bin_width(n, dt)
    expect = sorted([branch_frequencies(cfg, 0.0)[1], branch_frequencies(cfg, q1)[1]])
    assert len(peaks) == 2
    np.testing.assert_array_less(np.abs(peaks - expect), bin_w)


def test_spectrum_of_zero_and_bad_sampling():
    cfg = chain()
    traj = integrate_chain(build_chain(cfg), cfg, 0.01, 4095)
    assert measured_spectrum(traj, 0).size == 0
    with pytest.raises(ValueError, match="at least"):
        measured_spectrum(integrate_chain(build_chain(cfg), cfg, 0.01, 100), 0)
    t = traj.times.copy()
    t[10] += 1e-3
    bad = ChainTrajectory(t, traj.displacements, traj.velocities)
    with pytest.raises(ValueError, match="uniform"):
        measured_spectrum(bad, 0)
