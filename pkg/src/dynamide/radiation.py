"""Lorentz friction, its work, and the driven oscillator with radiation reaction.

Sampled trajectories carry ``r``, ``v`` and ``a``; third derivatives come
either from an analytic jerk (sinusoid sources) or from a 5-point central
stencil on the acceleration samples.

The driven equation ``m r'' - m tau r''' + m wc^2 r = -e E`` is integrated in
order-reduced form, ``r''' ~ d/dt(-wc^2 r - (e/m) E)``, which has no runaway
solutions.  With ``E(t) = Re(E exp(-i w t))`` its steady state is
``Re(R exp(-i w t))`` with ``R = (e/m) E / (w^2 - wc^2 + i tau w^3)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from . import kernels
from .constants import PhysicalConstants

__all__ = [
    "OscillatorTrajectory",
    "DielectricSpec",
    "DriveSpec",
    "sinusoid_trajectory",
    "newton_response",
    "friction_force",
    "friction_work_average",
    "friction_work_terms",
    "thomson_cross_section",
    "poynting_flux",
    "magnetic_work",
    "interaction_equivalence",
    "fermi_potential_forms",
    "driven_trajectory",
    "fit_steady_state",
    "steady_state_amplitude",
    "dielectric_epsilon",
    "dielectric_sweep",
    "resonance_scan",
    "half_power_width",
]

ANALYTIC = "analytic"
NUMERIC = "numeric"

MAX_PHASE_STEP = 0.05      # dt * w bound for the driven integrator
MAX_TAU_WC = 0.1           # order reduction validity
MIN_PERIODS = 5
GRID_RTOL = 1e-9


def _vec3(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[1] == 1:
        a = np.hstack([a, np.zeros((a.shape[0], 2))])
    return a


@dataclass(frozen=True)
class OscillatorTrajectory:
    """Uniformly sampled 3-vector trajectory.

    ``jerk`` (third derivative) is present only for analytic sources; ``period``
    is the drive or oscillation period when known.
    """

    times: np.ndarray
    r: np.ndarray
    v: np.ndarray
    a: np.ndarray
    source: str = NUMERIC
    jerk: Optional[np.ndarray] = None
    period: Optional[float] = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64).reshape(-1)
        if t.size < 2:
            raise ValueError("trajectory needs at least two samples")
        steps = np.diff(t)
        if np.any(steps <= 0) or np.ptp(steps) > GRID_RTOL * steps.mean() + 8 * np.finfo(float).eps * np.abs(t).max():
            raise ValueError("trajectory samples must be uniformly spaced")
        arrays = {}
        for name in ("r", "v", "a"):
            arr = _vec3(getattr(self, name))
            if arr.shape != (t.size, 3):
                raise ValueError(f"{name} must have one 3-vector per sample")
            arrays[name] = arr
        if self.source not in (ANALYTIC, NUMERIC):
            raise ValueError(f"unknown source {self.source!r}")
        jerk = self.jerk
        if jerk is not None:
            jerk = _vec3(jerk)
            if jerk.shape != (t.size, 3):
                raise ValueError("jerk must have one 3-vector per sample")
        object.__setattr__(self, "times", t)
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "jerk", jerk)

    @property
    def dt(self) -> float:
        return float((self.times[-1] - self.times[0]) / (self.times.size - 1))

    def __len__(self):
        return self.times.size

    def third_derivative(self) -> np.ndarray:
        """``r'''`` per sample; NaN where the stencil does not reach."""
        if self.jerk is not None:
            return self.jerk
        out = np.full_like(self.a, np.nan)
        a = self.a
        out[2:-2] = (a[:-4] - 8.0 * a[1:-3] + 8.0 * a[3:-1] - a[4:]) / (12.0 * self.dt)
        return out


def sinusoid_trajectory(amplitude, omega: float, times, phase: float = 0.0) -> OscillatorTrajectory:
    """Analytic ``r = amplitude cos(w t + phase)`` with exact derivatives."""
    amp = np.asarray(amplitude, dtype=np.float64).reshape(1, 3)
    t = np.asarray(times, dtype=np.float64).reshape(-1, 1)
    c, s = np.cos(omega * t + phase), np.sin(omega * t + phase)
    return OscillatorTrajectory(
        t[:, 0], amp * c, -omega * amp * s, -omega**2 * amp * c,
        source=ANALYTIC, jerk=omega**3 * amp * s, period=2.0 * math.pi / omega,
    )


def newton_response(e_amp, omega: float, times, k: PhysicalConstants, sign: float = -1.0) -> tuple:
    """Free-charge response to ``E = e_amp cos(w t)`` under ``m r'' = sign * e E``.

    Returns ``(trajectory, E, E_dot)`` sampled on ``times``.
    """
    e_amp = np.asarray(e_amp, dtype=np.float64).reshape(1, 3)
    t = np.asarray(times, dtype=np.float64).reshape(-1, 1)
    traj = sinusoid_trajectory(-sign * (k.e / (k.m * omega**2)) * e_amp[0], omega, t[:, 0])
    e = e_amp * np.cos(omega * t)
    e_dot = -omega * e_amp * np.sin(omega * t)
    return traj, e, e_dot


def friction_force(traj: OscillatorTrajectory, k: PhysicalConstants, at: int) -> np.ndarray:
    """``(2/3)(e^2/C^3) r'''`` at sample ``at``."""
    n = len(traj)
    if traj.jerk is None:
        if not 2 <= at <= n - 3:
            raise IndexError(f"sample {at} outside the stencil range [2, {n - 3}]")
    elif not 0 <= at < n:
        raise IndexError(f"sample {at} out of range")
    return (2.0 / 3.0) * k.e2 / k.c**3 * traj.third_derivative()[at]


def _whole_period_window(traj: OscillatorTrajectory) -> slice:
    """Samples covering the largest whole number of periods from the first usable sample."""
    if traj.period is None or not traj.period > 0:
        raise ValueError("trajectory period is required for whole-period averaging")
    lo = 0 if traj.jerk is not None else 2
    hi = len(traj) if traj.jerk is not None else len(traj) - 2
    span = (hi - 1 - lo) * traj.dt
    n_per = int(math.floor(span / traj.period + 1e-9))
    if n_per < MIN_PERIODS:
        raise ValueError(f"trajectory spans {span / traj.period:.3g} periods; need at least {MIN_PERIODS}")
    count = int(round(n_per * traj.period / traj.dt))
    return slice(lo, lo + count)


def friction_work_terms(traj: OscillatorTrajectory, k: PhysicalConstants) -> tuple:
    """Whole-period averages ``(<v.F>, <d/dt(v.a)> part, -<a.a> part)``, each scaled by ``(2/3) e^2/C^3``.

    ``v . r''' = d/dt(v . a) - a . a``; the middle entry is the residual
    ``<v.F> - main`` and vanishes on whole periods.
    """
    w = _whole_period_window(traj)
    g = (2.0 / 3.0) * k.e2 / k.c**3
    v, a, j = traj.v[w], traj.a[w], traj.third_derivative()[w]
    total = g * float(np.mean(np.einsum("ij,ij->i", v, j)))
    main = -g * float(np.mean(np.einsum("ij,ij->i", a, a)))
    return total, total - main, main


def friction_work_average(traj: OscillatorTrajectory, k: PhysicalConstants) -> float:
    """Time average of ``v . F_fr`` over whole periods."""
    return friction_work_terms(traj, k)[0]


def thomson_cross_section(k: PhysicalConstants) -> float:
    return 8.0 * math.pi / 3.0 * (k.e2 / (k.m * k.c**2)) ** 2


def poynting_flux(e_field, k: PhysicalConstants):
    """Energy flux ``C eps0 |E|^2`` of a plane wave (``C |E|^2 / 4 pi`` in natural units)."""
    e = np.asarray(e_field, dtype=np.float64)
    return k.c * k.eps0 * np.sum(e * e, axis=-1)


def magnetic_work(v, h, k: PhysicalConstants):
    """Power of the magnetic Lorentz force, ``(e/C) v . (v x H)``."""
    v = np.asarray(v, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    return (k.e / k.c) * np.sum(v * np.cross(v, h), axis=-1)


def _time_derivative(x: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order central difference; NaN at the two end samples on each side."""
    out = np.full_like(x, np.nan)
    out[2:-2] = (x[:-4] - 8.0 * x[1:-3] + 8.0 * x[3:-1] - x[4:]) / (12.0 * dt)
    return out


def interaction_equivalence(traj: OscillatorTrajectory, e_field, a_field, k: PhysicalConstants,
                            check_tol: float = 1e-6) -> tuple:
    """Integrals of ``-e v.A`` and ``-e r.E`` and the boundary term ``-e [r.A]``.

    Integration by parts gives ``lhs = rhs + boundary``.  ``E = -dA/dt`` is
    checked on the samples (relative to the field scale) before integrating.
    """
    e_field = _vec3(e_field)
    a_field = _vec3(a_field)
    n = len(traj)
    if e_field.shape != (n, 3) or a_field.shape != (n, 3):
        raise ValueError("field samples must be on the trajectory grid")
    if n >= 5:
        resid = _time_derivative(a_field, traj.dt)[2:-2] + e_field[2:-2]
        scale = max(np.abs(e_field).max(), np.abs(a_field).max() * 2 * math.pi / (traj.dt * n), 1e-300)
        if np.abs(resid).max() > check_tol * scale:
            raise ValueError("sampled fields violate E = -dA/dt")
    t = traj.times
    lhs = integrate.simpson(-k.e * np.einsum("ij,ij->i", traj.v, a_field), x=t)
    rhs = integrate.simpson(-k.e * np.einsum("ij,ij->i", traj.r, e_field), x=t)
    boundary = -k.e * (traj.r[-1] @ a_field[-1] - traj.r[0] @ a_field[0])
    return float(lhs), float(rhs), float(boundary)


def fermi_potential_forms(traj: OscillatorTrajectory, e_field, e_dot, k: PhysicalConstants) -> tuple:
    """Three time series of the friction potential.

    ``V_m2 = -(2 e^2 / 3 m C^3) r.E'`` (as written, with the Gaussian ``e^2``),
    ``V_m3 = tau (J.E)`` with ``J = e v``, and ``V_m4 = -(2/3)(e^2/C^3) r.r'''``.
    """
    e_field = _vec3(e_field)
    e_dot = _vec3(e_dot)
    n = len(traj)
    if e_field.shape != (n, 3) or e_dot.shape != (n, 3):
        raise ValueError("field samples must be on the trajectory grid")
    tau = k.friction_time
    v2 = -tau * np.einsum("ij,ij->i", traj.r, e_dot)
    v3 = tau * k.e * np.einsum("ij,ij->i", traj.v, e_field)
    v4 = -(2.0 / 3.0) * k.e2 / k.c**3 * np.einsum("ij,ij->i", traj.r, traj.third_derivative())
    return v2, v3, v4


# -- driven oscillator ------------------------------------------------------

@dataclass(frozen=True)
class DriveSpec:
    e_amp: np.ndarray
    omega: float
    omega_c: float
    tau: float
    m: float = 1.0
    e: float = 1.0

    def __post_init__(self):
        amp = np.asarray(self.e_amp, dtype=np.complex128).reshape(-1)
        if amp.size == 1:
            amp = np.array([amp[0], 0.0, 0.0], dtype=np.complex128)
        if amp.size != 3:
            raise ValueError("e_amp must be a scalar or a 3-vector")
        if not (self.omega > 0 and self.omega_c > 0):
            raise ValueError("omega and omega_c must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if not (self.m > 0):
            raise ValueError("m must be positive")
        object.__setattr__(self, "e_amp", amp)

    @classmethod
    def from_constants(cls, e_amp, omega: float, omega_c: float, k: PhysicalConstants, tau: Optional[float] = None):
        return cls(e_amp, omega, omega_c, k.friction_time if tau is None else tau, k.m, k.e)

    def with_omega(self, omega: float) -> "DriveSpec":
        return DriveSpec(self.e_amp, omega, self.omega_c, self.tau, self.m, self.e)

    @property
    def denominator(self) -> complex:
        return self.omega**2 - self.omega_c**2 + 1j * self.tau * self.omega**3

    @property
    def linewidth(self) -> float:
        """Energy decay rate of free oscillations, ``tau wc^2``."""
        return self.tau * self.omega_c**2


def steady_state_amplitude(drive: DriveSpec) -> np.ndarray:
    """Complex steady-state ``R`` of the driven equation."""
    return (drive.e / drive.m) * drive.e_amp / drive.denominator


def driven_trajectory(drive: DriveSpec, t_end: float, dt: float, stride: int = 1, t_record: float = 0.0,
                      r0=None, v0=None) -> OscillatorTrajectory:
    """Integrate the order-reduced driven equation from rest (or ``r0``, ``v0``) at t = 0.

    Samples every ``stride`` steps from ``t_record`` on.
    """
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    w_fast = max(drive.omega, drive.omega_c)
    if dt * w_fast >= MAX_PHASE_STEP:
        raise ValueError(f"dt * omega = {dt * w_fast:.3g} must stay below {MAX_PHASE_STEP}")
    if drive.tau * drive.omega_c >= MAX_TAU_WC:
        raise ValueError(f"tau * omega_c = {drive.tau * drive.omega_c:.3g}; order reduction needs < {MAX_TAU_WC}")
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    first = int(math.ceil(t_record / dt - 1e-9)) if t_record > 0 else 0
    if first > n_steps:
        raise ValueError("t_record lies beyond t_end")
    r0 = np.zeros(3) if r0 is None else np.asarray(r0, dtype=np.float64)
    v0 = np.zeros(3) if v0 is None else np.asarray(v0, dtype=np.float64)
    rs, vs, acc = kernels.rk4_driven(
        r0, v0, drive.e_amp.real.copy(), drive.e_amp.imag.copy(), float(drive.omega), float(drive.omega_c),
        float(drive.tau), float(drive.e / drive.m), float(dt), n_steps, int(stride), first,
    )
    times = dt * (first + stride * np.arange(rs.shape[0]))
    return OscillatorTrajectory(times, rs, vs, acc, source=NUMERIC, period=2.0 * math.pi / drive.omega)


def fit_steady_state(traj: OscillatorTrajectory, omega: float, n_periods: Optional[int] = None) -> np.ndarray:
    """Least-squares ``R`` in ``r = Re(R exp(-i w t))`` over the final whole periods."""
    period = 2.0 * math.pi / omega
    span = traj.times[-1] - traj.times[0]
    avail = int(math.floor(span / period + 1e-9))
    n_periods = avail if n_periods is None else min(n_periods, avail)
    if n_periods < 1:
        raise ValueError("trajectory shorter than one period")
    start = traj.times[-1] - n_periods * period
    sel = traj.times >= start - 1e-12 * period
    t = traj.times[sel]
    basis = np.column_stack([np.cos(omega * t), np.sin(omega * t)])
    coef, *_ = np.linalg.lstsq(basis, traj.r[sel], rcond=None)
    return coef[0] + 1j * coef[1]


# -- dielectric function ----------------------------------------------------

@dataclass(frozen=True)
class DielectricSpec:
    """Terms ``(n_q, w_q)`` of the supplementary polarization sum."""

    terms: tuple
    omega_c: float
    m: float
    tau: float

    def __post_init__(self):
        terms = tuple((float(n), float(w)) for n, w in self.terms)
        for n, w in terms:
            if n < 0:
                raise ValueError("mode densities must be non-negative")
            if not w > 0:
                raise ValueError("mode frequencies must be positive")
        if not (self.m > 0 and self.omega_c > 0):
            raise ValueError("m and omega_c must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        object.__setattr__(self, "terms", terms)


def dielectric_epsilon(spec: DielectricSpec) -> float:
    """``1 + sum 4 pi n (w - wc) / (m [4 (w - wc)^2 + tau^2 w^4])``.

    Near resonance ``w^2 - wc^2 ~ 2 wc (w - wc)``, which relates the bracket
    to the driven-oscillator denominator.
    """
    eps = 1.0
    for n, w in spec.terms:
        d = w - spec.omega_c
        den = spec.m * (4.0 * d * d + spec.tau**2 * w**4)
        if den == 0.0:
            continue  # tau = 0 at w = wc: numerator vanishes too
        eps += 4.0 * math.pi * n * d / den
    return eps


def dielectric_sweep(density: float, omegas: Sequence[float], omega_c: float, m: float, tau: float) -> list:
    """``(w_q, eps)`` rows for a single term swept over ``omegas``."""
    return [(float(w), dielectric_epsilon(DielectricSpec(((density, w),), omega_c, m, tau))) for w in omegas]


# -- resonance scan ---------------------------------------------------------

def resonance_scan(drive: DriveSpec, omegas: Sequence[float]) -> list:
    """``(w, |R(w)|)`` rows of the closed-form steady-state modulus."""
    grid = np.asarray(omegas, dtype=np.float64)
    if grid.size and np.any(np.diff(grid) <= 0):
        raise ValueError("frequency grid must be sorted ascending")
    amp = np.linalg.norm(drive.e_amp)
    tau, wc2, qm = drive.tau, drive.omega_c**2, drive.e / drive.m
    den = np.abs(grid**2 - wc2 + 1j * tau * grid**3)
    return [(float(w), float(qm * amp / d)) for w, d in zip(grid, den)]


def half_power_width(omegas, amplitudes) -> float:
    """Full width of the band where ``amplitude^2`` exceeds half its peak (linear interpolation)."""
    w = np.asarray(omegas, dtype=np.float64)
    p = np.asarray(amplitudes, dtype=np.float64) ** 2
    i = int(np.argmax(p))
    half = 0.5 * p[i]
    lo = i
    while lo > 0 and p[lo] > half:
        lo -= 1
    hi = i
    while hi < p.size - 1 and p[hi] > half:
        hi += 1
    if p[lo] > half or p[hi] > half:
        raise ValueError("grid does not bracket the half-power points")
    w_lo = w[lo] + (half - p[lo]) * (w[lo + 1] - w[lo]) / (p[lo + 1] - p[lo])
    w_hi = w[hi - 1] + (half - p[hi - 1]) * (w[hi] - w[hi - 1]) / (p[hi] - p[hi - 1])
    return float(w_hi - w_lo)
