"""Deterministic invariant suite behind the ``verify`` command.

Every check compares a computed quantity against an analytic oracle and
reports the measured error next to its tolerance.  Inputs that would
otherwise be random come from a low-discrepancy sequence, so repeated runs
are bit-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import emission as em
from . import fields as fl
from . import lattice as lt
from . import radiation as rad
from .constants import SpringParams, make_constants

__all__ = ["CheckResult", "CHECKS", "run_checks", "quasi_random", "quasi_mode_set"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.measured) and self.measured <= self.tolerance)

    def row(self):
        return (self.name, self.measured, self.tolerance, "pass" if self.passed else "fail")


def quasi_random(n: int, dim: int, offset: int = 1) -> np.ndarray:
    """Points of the additive recurrence ``frac(k * alpha)`` in ``[0, 1)^dim``.

    ``alpha`` holds powers of the inverse of the generalized golden ratio of
    dimension ``dim``.
    """
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (dim + 1))
    alpha = (1.0 / phi) ** np.arange(1, dim + 1)
    k = np.arange(offset, offset + n, dtype=np.float64)[:, None]
    return np.mod(0.5 + k * alpha[None, :], 1.0)


def quasi_mode_set(n_modes: int, k, cell_volume: float = 1.0, n_cells: int = 1, offset: int = 1) -> fl.ModeSet:
    """Transverse light-cone modes with directions, magnitudes and amplitudes from :func:`quasi_random`."""
    pts = quasi_random(n_modes, 7, offset)
    modes = []
    for u in pts:
        cos_t = 2.0 * u[0] - 1.0
        sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
        ph = 2.0 * math.pi * u[1]
        n_hat = np.array([sin_t * math.cos(ph), sin_t * math.sin(ph), cos_t])
        e1 = np.cross(n_hat, [0.0, 0.0, 1.0] if abs(cos_t) < 0.9 else [1.0, 0.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n_hat, e1)
        psi = 2.0 * math.pi * u[2]
        pol = math.cos(psi) * e1 + math.sin(psi) * e2
        q = n_hat * (0.5 + 2.5 * u[3])
        alpha = complex(2.0 * u[4] - 1.0, 2.0 * u[5] - 1.0)
        modes.append(fl.FieldMode.along(q, pol, k.c, alpha, int(5 * u[6])))
    return fl.ModeSet(tuple(modes), k, cell_volume, n_cells)


# -- emission -----------------------------------------------------------------

def _needle(rate: float = 2.0 / 3.0, span: float = 10.0):
    k = make_constants()
    params = em.EmissionParams.from_rate(rate, k)
    lam0 = em.TwoLevelState(np.array([1.0, 1.0]) / math.sqrt(2.0))
    return params, em.integrate_symmetric(params, lam0, span / rate, 1e-3 / rate)


def check_first_integral() -> List[CheckResult]:
    _, traj = _needle()
    return [CheckResult("emission.first_integral", traj.norm_error, 1e-10)]


def check_closed_form() -> List[CheckResult]:
    params, traj = _needle()
    p1, _ = em.analytic_populations(traj.times, params.rate)
    env = em.hybrid_envelope(traj.times, params.rate)
    centre = int(np.argmin(np.abs(traj.times)))
    return [
        CheckResult("emission.logistic_oracle", float(np.max(np.abs(traj.populations[:, 0] - p1))), 1e-8),
        CheckResult("emission.envelope_oracle", float(np.max(np.abs(traj.envelope - env))), 1e-8),
        CheckResult("emission.envelope_peak", abs(float(traj.envelope[centre]) - 0.5), 1e-12),
    ]


def secular_reduction_error(gap_ratio: float = 100.0, periods_per_window: int = 10) -> float:
    """Largest population difference between window-averaged full and secular trajectories.

    Three levels with incommensurate gaps; the strongest pair has ``A`` equal
    to the smallest gap divided by ``gap_ratio``.
    """
    k = make_constants()
    w = np.array([0.0, 1.0, 1.0 + math.sqrt(2.0)])
    d = np.zeros((3, 3), dtype=np.complex128)
    d[0, 1], d[1, 2], d[0, 2] = 1.0, 0.6j, 0.3
    d = d + np.conj(d.T)
    base = em.LevelSystem(w, d, k)
    gaps = np.abs(w[:, None] - w[None, :])
    rates = base.coupling * gaps**3 * base.pair_strength()
    scale = math.sqrt((1.0 / gap_ratio) / rates.max())  # A_max = min gap / gap_ratio
    sys = em.LevelSystem(w, d * scale, k)
    a_max = (sys.coupling * gaps**3 * sys.pair_strength()).max()
    lam0 = np.array([0.3, 0.5 * np.exp(0.4j), 0.81 * np.exp(-1.1j)])
    lam0 = lam0 / np.linalg.norm(lam0)
    beat = 2.0 * math.pi / gaps[gaps > 0].min()
    steps_per_beat = 200
    h = beat / steps_per_beat
    t_end = 4.0 / a_max
    full = em.integrate_levels(sys, lam0, 0.0, t_end, h, "full")
    sec = em.integrate_levels(sys, lam0, 0.0, t_end, h, "secular")
    win = periods_per_window * steps_per_beat

    def smooth(p):
        c = np.cumsum(np.vstack([np.zeros((1, p.shape[1])), p]), axis=0)
        return (c[win:] - c[:-win]) / win

    return float(np.max(np.abs(smooth(full.populations) - smooth(sec.populations))))


def check_secular_reduction() -> List[CheckResult]:
    return [CheckResult("emission.secular_reduction", secular_reduction_error(), 1e-2)]


def check_emission_chain() -> List[CheckResult]:
    k = make_constants()
    sys = em.two_level_system(1.0, 1.0, k)
    a = em.emission_constant(sys, 0, 1).rate
    p12 = em.transition_probability(1.0, 1.0, k)
    inten = em.emission_intensity(1.0, 1.0, k)
    return [
        CheckResult("emission.rate_natural", abs(a - 2.0 / 3.0), 1e-15),
        CheckResult("emission.probability_ratio", abs(p12 / a - 2.0), 1e-15),
        CheckResult("emission.intensity_ratio", abs(inten / (k.hbar * 1.0) - p12), 1e-15),
    ]


def check_mode_continuum() -> List[CheckResult]:
    k = make_constants()
    sys = em.two_level_system(1e-4, 3.0, k)
    a = em.emission_constant(sys, 0, 1).rate
    return [CheckResult("emission.mode_continuum_rate", abs(em.mode_integrated_rate(sys, 0, 1) / a - 1.0), 1e-4)]


# -- lattice ------------------------------------------------------------------

def _chain(chi: float, chi_tilde: float = 1.0, theta: float = 1.0, n_cells: int = 8) -> lt.LatticeConfig:
    return lt.LatticeConfig(n_cells, SpringParams(chi, chi_tilde, theta))


def check_frequency_bookkeeping() -> List[CheckResult]:
    cfg = _chain(2.0)
    w2 = np.linalg.eigvalsh(lt.dynamical_matrix(cfg, 0.0))
    target = 2.0 * (2.0 * cfg.springs.chi_tilde / cfg.theta)
    w_opt = math.sqrt(w2[1])
    dt = 0.01 / lt.max_frequency(cfg)
    n = 8192
    traj = lt.integrate_chain(lt.build_chain(cfg, (0.0, 1.0, "optical")), cfg, dt, n - 1)
    peaks = lt.measured_spectrum(traj, 0)
    bin_w = lt.spectrum_bin_width(n, dt)
    miss = float(np.min(np.abs(peaks - w_opt)) / bin_w) if peaks.size else math.inf
    cfg0 = _chain(0.0)
    iso = np.linalg.eigvalsh(lt.dynamical_matrix(cfg0, 0.0))
    return [
        CheckResult("lattice.optical_q0_doubling", abs(w2[1] - target) / target, 1e-10),
        CheckResult("lattice.isolated_dynamide", float(np.max(np.abs(iso - [0.0, 2.0])) / 2.0), 1e-12),
        CheckResult("lattice.spectrum_peak_bins", miss, 1.0),
        CheckResult("lattice.spectrum_peak_count", abs(float(peaks.size) - 1.0), 0.0),
    ]


def verlet_quality(n_steps: int = 100_000, phase_step: float = 1e-3) -> tuple:
    """(max relative energy deviation, relative period error, return-to-seed error)."""
    cfg = _chain(2.0)
    w = lt.max_frequency(cfg)
    period = 2.0 * math.pi / w
    steps_per_period = int(round(period / (phase_step / w)))
    dt = period / steps_per_period
    seed = lt.build_chain(cfg, (0.0, 1.0, "optical"))
    traj = lt.integrate_chain(seed, cfg, dt, n_steps)
    e = traj.energies
    energy_err = float(np.max(np.abs(e - e[0])) / e[0])
    # upward zero crossings of the stretch velocity, linearly interpolated
    sv = traj.velocities[:, 0, 1] - traj.velocities[:, 0, 0]
    idx = np.nonzero((sv[:-1] < 0) & (sv[1:] >= 0))[0]
    cross = traj.times[idx] + dt * sv[idx] / (sv[idx] - sv[idx + 1])
    measured = float(np.mean(np.diff(cross))) if cross.size > 1 else math.nan
    period_err = abs(measured - period) / period
    back = traj.displacements[steps_per_period]
    seed_err = float(np.max(np.abs(back - seed.displacements)) / np.max(np.abs(seed.displacements)))
    return energy_err, period_err, seed_err


def check_verlet() -> List[CheckResult]:
    energy_err, period_err, seed_err = verlet_quality()
    return [
        CheckResult("lattice.verlet_energy_drift", energy_err, 1e-6),
        CheckResult("lattice.seeded_period", period_err, 1e-6),
        CheckResult("lattice.return_to_seed", seed_err, 1e-6),
    ]


# -- fields -------------------------------------------------------------------

def field_identity_errors(ms: fl.ModeSet, n_points: int = 6) -> tuple:
    """Relative errors of ``E = -dA/dt`` and ``mu0 H = curl A`` by central differences."""
    k = ms.constants
    w = np.array([m.omega for m in ms.modes])
    qn = np.array([np.linalg.norm(m.q) for m in ms.modes])
    period = 2.0 * math.pi / w.max()
    wavelength = 2.0 * math.pi / qn.max()
    h_t, h_x = 1e-4 * period, 1e-4 * wavelength
    pts = quasi_random(n_points, 4, offset=101)
    e_err = h_err = e_scale = h_scale = 0.0
    # sample points within a few periods and wavelengths so that t + h keeps its digits
    for u in pts:
        r = 4.0 * wavelength * (u[:3] - 0.5)
        t = 3.0 * period * u[3]
        e = fl.electric_field(ms, r, t)
        de = e + fl.time_derivative(fl.vector_potential, ms, r, t, h_t)
        hh = k.mu0 * fl.magnetic_field(ms, r, t)
        dh = hh - fl.curl(fl.vector_potential, ms, r, t, h_x)
        e_err, e_scale = max(e_err, np.linalg.norm(de)), max(e_scale, np.linalg.norm(e))
        h_err, h_scale = max(h_err, np.linalg.norm(dh)), max(h_scale, np.linalg.norm(hh))
    return e_err / e_scale, h_err / h_scale


def check_field_identities() -> List[CheckResult]:
    k = make_constants()
    ms = quasi_mode_set(8, k, cell_volume=2.0, n_cells=3)
    e_rel, h_rel = field_identity_errors(ms)
    g1, g2 = fl.vector_potential_prefactors(ms)
    ms_si = quasi_mode_set(8, make_constants("si"))
    g1s, g2s = fl.vector_potential_prefactors(ms_si)
    return [
        CheckResult("fields.E_equals_minus_dA_dt", e_rel, 1e-6),
        CheckResult("fields.mu0H_equals_curl_A", h_rel, 1e-6),
        CheckResult("fields.g1_g2_natural", float(np.max(np.abs(g1 / g2 - 1.0))), 1e-12),
        CheckResult("fields.g1_g2_si", float(np.max(np.abs(g1s / g2s - 1.0))), 1e-12),
    ]


def check_mode_momentum() -> List[CheckResult]:
    k = make_constants()
    ms = quasi_mode_set(8, k, cell_volume=1.5, n_cells=2)
    worst = 0.0
    for mode in ms.modes + (fl.FieldMode.along([0.0, 0.0, 1.3], [1.0, 0.0, 0.0], k.c, 0.0, 0),):
        single = fl.ModeSet((mode,), k, ms.cell_volume, ms.n_cells)
        p = fl.mode_momentum_expectation(single)
        expect = (mode.n + 0.5) * k.hbar * mode.omega / (single.volume * k.c)
        worst = max(worst, float(np.linalg.norm(p - expect * mode.direction) / expect))
    return [CheckResult("fields.mode_momentum_half_quantum", worst, 4.0 * np.finfo(float).eps)]


# -- radiation reaction -------------------------------------------------------

def thomson_identity_error() -> float:
    k = make_constants()
    worst = 0.0
    for u in quasi_random(5, 3, offset=7):
        e_amp = 2.0 * u - 1.0
        omega = 0.7
        period = 2.0 * math.pi / omega
        times = np.arange(8 * 64) * (period / 64)
        traj, e, _ = rad.newton_response(e_amp, omega, times, k)
        work = rad.friction_work_average(traj, k)
        flux = float(np.mean(rad.poynting_flux(e, k)))
        target = -rad.thomson_cross_section(k) * flux
        worst = max(worst, abs(work / target - 1.0))
    return worst


def magnetic_work_error(n_pairs: int = 10_000) -> float:
    k = make_constants()
    pts = 2.0 * quasi_random(n_pairs, 6, offset=3) - 1.0
    v, h = pts[:, :3], pts[:, 3:]
    w = rad.magnetic_work(v, h, k)
    scale = (k.e / k.c) * np.sum(v * v, axis=1) * np.linalg.norm(h, axis=1)
    return float(np.max(np.abs(w) / scale))


def check_radiation() -> List[CheckResult]:
    si = make_constants("si")
    return [
        CheckResult("radiation.thomson_work_identity", thomson_identity_error(), 1e-4),
        CheckResult("radiation.thomson_si", abs(rad.thomson_cross_section(si) / 6.652e-29 - 1.0), 1e-3),
        CheckResult("radiation.magnetic_work_zero", magnetic_work_error(), 1e-15),
    ]


def driven_errors(omegas=(0.5, 0.75, 1.0, 1.25, 1.5, 2.0), tau: float = 1e-3) -> tuple:
    """Worst relative modulus error and phase error (rad) of the driven steady state."""
    mod_err = ph_err = 0.0
    for w in omegas:
        drive = rad.DriveSpec([1.0, 0.0, 0.0], w, 1.0, tau)
        decay = 0.5 * drive.linewidth
        t_end = 12.0 / decay
        period = 2.0 * math.pi / w
        traj = rad.driven_trajectory(drive, t_end, 0.04 / max(w, 1.0), t_record=t_end - 20.0 * period)
        r_num = rad.fit_steady_state(traj, w)[0]
        r_cf = rad.steady_state_amplitude(drive)[0]
        mod_err = max(mod_err, abs(abs(r_num) / abs(r_cf) - 1.0))
        ph_err = max(ph_err, abs(np.angle(r_num / r_cf)))
    return mod_err, ph_err


def resonance_scan_errors(tau: float = 1e-3, omega_c: float = 1.0) -> tuple:
    """(peak offset in grid steps, relative width error) of a closed-form scan."""
    drive = rad.DriveSpec([1.0, 0.0, 0.0], omega_c, omega_c, tau)
    width = tau * omega_c**2
    step = width / 500.0
    grid = omega_c + step * np.arange(-2000, 2001)
    rows = rad.resonance_scan(drive, grid)
    amps = np.array([a for _, a in rows])
    peak = grid[int(np.argmax(amps))]
    fwhm = rad.half_power_width(grid, amps)
    return abs(peak - omega_c) / step, abs(fwhm / width - 1.0)


def check_resonance() -> List[CheckResult]:
    mod_err, ph_err = driven_errors()
    peak_off, width_err = resonance_scan_errors()
    return [
        CheckResult("radiation.driven_modulus", mod_err, 1e-2),
        CheckResult("radiation.driven_phase", ph_err, 1e-2),
        CheckResult("radiation.scan_peak_offset_steps", peak_off, 0.5),
        CheckResult("radiation.scan_half_power_width", width_err, 1e-2),
    ]


def dielectric_errors(n_points: int = 100) -> tuple:
    vac = rad.dielectric_epsilon(rad.DielectricSpec(((0.0, 1.3), (0.0, 0.7)), 1.0, 1.0, 1e-3))
    on = rad.dielectric_epsilon(rad.DielectricSpec(((2.0, 1.0),), 1.0, 1.0, 1e-3))
    sweep = rad.dielectric_sweep(0.5, np.linspace(0.5, 1.5, n_points), 1.0, 1.0, 1e-3)
    wrong = sum(1 for w, eps in sweep if np.sign(eps - 1.0) != np.sign(w - 1.0))
    return abs(vac - 1.0), abs(on - 1.0), float(wrong)


def check_dielectric() -> List[CheckResult]:
    vac, on, wrong = dielectric_errors()
    return [
        CheckResult("radiation.dielectric_vacuum", vac, 0.0),
        CheckResult("radiation.dielectric_on_resonance", on, 0.0),
        CheckResult("radiation.dielectric_sign_mismatches", wrong, 0.0),
    ]


CHECKS: List[Callable[[], List[CheckResult]]] = [
    check_first_integral,
    check_closed_form,
    check_secular_reduction,
    check_emission_chain,
    check_mode_continuum,
    check_frequency_bookkeeping,
    check_field_identities,
    check_mode_momentum,
    check_radiation,
    check_resonance,
    check_dielectric,
    check_verlet,
]


def run_checks() -> List[CheckResult]:
    out: List[CheckResult] = []
    for fn in CHECKS:
        out.extend(fn())
    return out
