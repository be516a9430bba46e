"""Coefficient equations of an emitting electron under Lorentz friction.

The wavefunction is expanded over bound levels ``sum_n lambda_n phi_n
exp(-i w_n t)``; friction couples the coefficients through the dipole matrix
elements.  Besides the general s-level equations (full and secular) this
module carries the two-level closed forms, the emission constant ``A``, the
transition rate and intensity, the needle-photon geometry, and the resonant
variant of the equations in which the coupling runs through field modes with
denominators ``w^2 - wc^2 +- i tau w^3``.

Time convention for driven response: a field ``Re(E exp(-i w t))`` produces
``Re(R exp(-i w t))`` with ``R = (e/m) E / (w^2 - wc^2 + i tau w^3)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from . import kernels
from .constants import PhysicalConstants, make_constants
from .fields import ModeSet

__all__ = [
    "LevelSystem",
    "TwoLevelState",
    "EmissionParams",
    "PhotonGeometry",
    "PopulationTrajectory",
    "emission_constant",
    "transition_probability",
    "emission_intensity",
    "photon_geometry",
    "momentum_dispersion",
    "secular_rhs",
    "full_rhs",
    "integrate_populations",
    "integrate_levels",
    "analytic_populations",
    "hybrid_envelope",
    "steady_state_radius",
    "resonant_rhs",
    "mode_integrated_rate",
    "dipole_expectation",
    "photon_amplitude",
    "hydrogen_1s_2p_dipole",
    "two_level_system",
]

NORM_TOL = 1e-9
LOGISTIC_CLAMP = 400.0
MAX_STEP_RATE = 1e-3  # dt * A must not exceed this


@dataclass(frozen=True)
class LevelSystem:
    """Bound levels with frequencies ``omega`` and dipole matrix ``dipole[n, s, :]``.

    ``dipole`` may be given as an ``(S, S)`` scalar matrix (taken along x) or
    as ``(S, S, 3)``; it must be Hermitian in the level indices.
    """

    frequencies: np.ndarray
    dipole: np.ndarray
    constants: PhysicalConstants

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=np.float64).reshape(-1)
        d = np.asarray(self.dipole, dtype=np.complex128)
        s = w.size
        if d.shape == (s, s):
            d3 = np.zeros((s, s, 3), dtype=np.complex128)
            d3[:, :, 0] = d
            d = d3
        if d.shape != (s, s, 3):
            raise ValueError(f"dipole must have shape ({s}, {s}) or ({s}, {s}, 3)")
        if np.any(np.diff(w) <= 0):
            raise ValueError("level frequencies must be strictly increasing")
        if not np.allclose(d, np.conj(np.swapaxes(d, 0, 1)), rtol=0.0, atol=1e-14 * max(1.0, np.abs(d).max())):
            raise ValueError("dipole matrix must be Hermitian: r_ns = conj(r_sn)")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "dipole", d)

    @property
    def n_levels(self) -> int:
        return self.frequencies.size

    @property
    def coupling(self) -> float:
        """``(2/3) e^2 / (hbar C^3)``."""
        k = self.constants
        return 2.0 * k.e2 / (3.0 * k.hbar * k.c**3)

    def pair_strength(self) -> np.ndarray:
        """``<n|r|s> . <s|r|n>`` for every pair; real and non-negative."""
        return np.einsum("nsj,snj->ns", self.dipole, self.dipole).real

    def quad_strength(self) -> np.ndarray:
        """``rr[l, k, s, n] = <l|r|k> . <s|r|n>``."""
        return np.einsum("lkj,snj->lksn", self.dipole, self.dipole)


def two_level_system(omega_c: float, r12: complex, k: Optional[PhysicalConstants] = None, omega_1: float = 0.0) -> LevelSystem:
    """Levels ``omega_1 < omega_1 + omega_c`` with matrix element ``r12`` along x."""
    k = make_constants() if k is None else k
    d = np.array([[0.0, r12], [np.conj(r12), 0.0]], dtype=np.complex128)
    return LevelSystem(np.array([omega_1, omega_1 + omega_c]), d, k)


@dataclass(frozen=True)
class TwoLevelState:
    lam: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "lam", lam)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.lam) ** 2))

    def check_normalized(self, tol: float = NORM_TOL) -> None:
        if abs(self.norm - 1.0) > tol:
            raise ValueError(f"coefficients are not normalized: sum |lambda|^2 = {self.norm!r}")


@dataclass(frozen=True)
class EmissionParams:
    rate: float        # A
    omega_c: float
    tau: float
    r12: float         # |<n|r|s>|

    def __post_init__(self):
        if self.rate < 0 or self.tau <= 0:
            raise ValueError("need A >= 0 and tau > 0")

    @classmethod
    def from_rate(cls, rate: float, k: Optional[PhysicalConstants] = None, omega_c: float = 1.0) -> "EmissionParams":
        """Parameters for a prescribed ``A``; ``r12`` is back-solved from the rate formula."""
        k = make_constants() if k is None else k
        kappa = 2.0 * k.e2 / (3.0 * k.hbar * k.c**3)
        r12 = math.sqrt(rate / (kappa * omega_c**3))
        return cls(rate, omega_c, k.friction_time, r12)


@dataclass(frozen=True)
class PhotonGeometry:
    sigma1: float
    dx2: float
    dy2: float
    length: float


def emission_constant(sys: LevelSystem, n: int, s: int) -> EmissionParams:
    """``A = (2/3)(e^2/(hbar C^3)) (w_s - w_n)^3 |<n|r|s>|^2`` for the pair n < s."""
    if n == s:
        raise ValueError("emission constant needs two distinct levels")
    if s < n:
        raise ValueError("expected n < s (lower level first)")
    gap = sys.frequencies[s] - sys.frequencies[n]
    strength = float(sys.pair_strength()[n, s])
    rate = sys.coupling * gap**3 * strength
    return EmissionParams(rate, float(gap), sys.constants.friction_time, math.sqrt(strength))


def transition_probability(omega12: float, r12: complex, k: PhysicalConstants) -> float:
    if not omega12 > 0:
        raise ValueError("omega12 must be positive")
    return 4.0 / 3.0 * k.e2 / (k.hbar * k.c**3) * omega12**3 * abs(r12) ** 2


def emission_intensity(omega12: float, r12: complex, k: PhysicalConstants) -> float:
    return transition_probability(omega12, r12, k) * k.hbar * omega12


def photon_geometry(omega: float, rate: float, k: PhysicalConstants) -> PhotonGeometry:
    """Needle photon: transverse dispersions ``(C/w)^2 / 2`` and length ``C/A``.

    The alternative wavelength forms of the cross-section differ from these by
    a factor of 2 and are not used.
    """
    if not (omega > 0 and rate > 0):
        raise ValueError("omega and A must be positive")
    d2 = 0.5 * (k.c / omega) ** 2
    return PhotonGeometry(math.pi * (d2 + d2), d2, d2, k.c / rate)


def momentum_dispersion(dx2: float, k: PhysicalConstants) -> float:
    """Minimum-uncertainty momentum dispersion ``hbar^2 / (4 dx^2)``."""
    return k.hbar**2 / (4.0 * dx2)


def secular_rhs(sys: LevelSystem, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=np.complex128)
    w = sys.frequencies
    cube = (w[:, None] - w[None, :]) ** 3
    return -sys.coupling * lam * ((cube * sys.pair_strength()) @ (np.abs(lam) ** 2))


def full_rhs(sys: LevelSystem, lam, t: float) -> np.ndarray:
    """Pre-secular equations: all products ``l_l conj(l_k) l_s`` with their phases."""
    lam = np.asarray(lam, dtype=np.complex128)
    w = sys.frequencies
    cube = (w[:, None] - w[None, :]) ** 3
    return kernels._full_np(lam, w, cube, sys.quad_strength(), sys.coupling, t)


# -- integration --------------------------------------------------------------

@dataclass(frozen=True)
class PopulationTrajectory:
    times: np.ndarray
    lam: np.ndarray  # (n_t, S) complex

    columns = ("t", "re_l1", "im_l1", "re_l2", "im_l2", "p1", "p2", "envelope")

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.lam) ** 2

    @property
    def norm_error(self) -> float:
        return float(np.max(np.abs(self.populations.sum(axis=1) - 1.0)))

    @property
    def envelope(self) -> np.ndarray:
        return np.abs(np.conj(self.lam[:, 0]) * self.lam[:, 1])

    def state(self, i: int) -> TwoLevelState:
        return TwoLevelState(self.lam[i], float(self.times[i]))

    def rows(self):
        p = self.populations
        env = self.envelope
        out = []
        for i, t in enumerate(self.times):
            l1, l2 = self.lam[i, 0], self.lam[i, 1]
            out.append((float(t), l1.real, l1.imag, l2.real, l2.imag, p[i, 0], p[i, 1], env[i]))
        return out


def _steps(t0: float, t_end: float, dt: float) -> tuple:
    span = t_end - t0
    if span == 0.0:
        return 0, 0.0
    n = int(math.ceil(abs(span) / dt - 1e-9))
    return n, span / n


def integrate_populations(params: EmissionParams, lam0: TwoLevelState, t_end: float, dt: float,
                          stride: int = 1) -> PopulationTrajectory:
    """RK4 integration of ``l1' = A l1 |l2|^2``, ``l2' = -A l2 |l1|^2``.

    Runs from ``lam0.time`` to ``t_end`` (either direction) with the step
    shrunk, if needed, to land exactly on ``t_end``.  Times are returned in
    ascending order.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if params.rate > 0 and dt * params.rate > MAX_STEP_RATE * (1 + 1e-12):
        raise ValueError(f"dt = {dt} exceeds the step rule dt <= 1e-3/A = {MAX_STEP_RATE / params.rate}")
    if lam0.lam.size != 2:
        raise ValueError("two-level state expected")
    lam0.check_normalized()
    n, h = _steps(lam0.time, t_end, dt)
    out = kernels.rk4_two_level(complex(lam0.lam[0]), complex(lam0.lam[1]), float(params.rate), float(h), int(n))
    idx = np.arange(0, n + 1, stride)
    if idx[-1] != n:
        idx = np.append(idx, n)
    times = lam0.time + h * idx
    lam = out[idx]
    if h < 0:
        times, lam = times[::-1], lam[::-1]
    return PopulationTrajectory(times, lam)


def integrate_symmetric(params: EmissionParams, lam0: TwoLevelState, half_span: float, dt: float,
                        stride: int = 1) -> PopulationTrajectory:
    """Integrate backwards and forwards from ``lam0`` over ``lam0.time +- half_span``."""
    back = integrate_populations(params, lam0, lam0.time - half_span, dt, stride)
    fwd = integrate_populations(params, lam0, lam0.time + half_span, dt, stride)
    times = np.concatenate([back.times, fwd.times[1:]])
    lam = np.concatenate([back.lam, fwd.lam[1:]])
    return PopulationTrajectory(times, lam)


def integrate_levels(sys: LevelSystem, lam0, t0: float, t_end: float, dt: float, mode: str = "secular",
                     stride: int = 1) -> PopulationTrajectory:
    """RK4 integration of the s-level equations, ``mode`` = ``"secular"`` or ``"full"``."""
    lam0 = np.asarray(lam0, dtype=np.complex128)
    n, h = _steps(t0, t_end, dt)
    if mode == "secular":
        out = kernels.rk4_secular(lam0, sys.frequencies, sys.pair_strength(), sys.coupling, h, n, stride)
    elif mode == "full":
        out = kernels.rk4_full(lam0, sys.frequencies, sys.quad_strength(), sys.coupling, t0, h, n, stride)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    times = t0 + h * stride * np.arange(out.shape[0])
    return PopulationTrajectory(times, out)


# -- closed forms ------------------------------------------------------------

def analytic_populations(t, rate: float):
    """Logistic solution ``(|l1|^2, |l2|^2)`` with ``|l1|^2 = |l2|^2 = 1/2`` at t = 0."""
    x = np.clip(2.0 * rate * np.asarray(t, dtype=np.float64), -LOGISTIC_CLAMP, LOGISTIC_CLAMP)
    p1 = 1.0 / (1.0 + np.exp(-x))
    p2 = 1.0 / (1.0 + np.exp(x))
    return p1, p2


def hybrid_envelope(t, rate: float):
    """``|conj(l1) l2| = 1 / (2 cosh(A t))``, evaluated without overflow."""
    x = np.abs(rate * np.asarray(t, dtype=np.float64))
    e = np.exp(-x)
    return e / (1.0 + e * e)


def steady_state_radius(omega: float, params: EmissionParams, e_amp, k: PhysicalConstants) -> np.ndarray:
    """Complex steady-state displacement ``(e/m) E / (w^2 - wc^2 + i tau w^3)``."""
    if not omega > 0:
        raise ValueError("drive frequency must be positive")
    denom = omega**2 - params.omega_c**2 + 1j * params.tau * omega**3
    return (k.e / k.m) * np.asarray(e_amp, dtype=np.complex128) / denom


# -- resonant coupling through field modes -------------------------------------

def _mode_arrays(modeset: ModeSet):
    pol = np.array([m.polarization for m in modeset.modes])
    w = np.array([m.omega for m in modeset.modes])
    alpha = np.array([m.alpha for m in modeset.modes], dtype=np.complex128)
    occ = np.array([m.n for m in modeset.modes], dtype=np.float64)
    return pol, w, alpha, occ


def _resonant_weights(sys: LevelSystem, modeset: ModeSet, t: float, include_counter_rotating: bool) -> np.ndarray:
    """Pair weights ``W[n, s] = sum_q w^2 |r_ns . I_q|^2 B_q(t)`` times ``4 pi e^2 / (hbar V)``.

    ``B_q = (y + i (2 n_q + 1) x) / (x^2 + y^2)`` with ``x = w^2 - w_ns^2`` and
    ``y = tau w^3`` collects the rotating terms (occupations n_q and n_q + 1);
    the counter-rotating terms add ``i [conj(alpha)^2 e^{2iwt} / (x - iy) +
    alpha^2 e^{-2iwt} / (x + iy)]``, which oscillate at twice the mode frequency.
    """
    k = sys.constants
    s_dim = sys.n_levels
    weights = np.zeros((s_dim, s_dim), dtype=np.complex128)
    if not modeset.modes:
        return weights
    pol, w, alpha, occ = _mode_arrays(modeset)
    tau = k.friction_time
    proj = np.abs(np.einsum("nsj,qj->nsq", sys.dipole, pol)) ** 2  # |r_ns . I_q|^2
    gap = np.abs(sys.frequencies[:, None] - sys.frequencies[None, :])
    x = w[None, None, :] ** 2 - gap[:, :, None] ** 2
    y = (tau * w**3)[None, None, :]
    den = x * x + y * y
    b = (y + 1j * (2.0 * occ[None, None, :] + 1.0) * x) / den
    if include_counter_rotating:
        e2 = np.exp(2j * w * t)
        b = b + 1j * (np.conj(alpha) ** 2 * e2 / (x - 1j * y) + alpha**2 / e2 / (x + 1j * y))
    weights = np.einsum("nsq,nsq->ns", (w**2)[None, None, :] * proj, b)
    return (4.0 * math.pi * k.e2 / (k.hbar * modeset.volume)) * weights


def resonant_rhs(sys: LevelSystem, modeset: ModeSet, lam, t: float, include_counter_rotating: bool = False) -> np.ndarray:
    """Secular coefficient equations with the coupling routed through field modes.

    ``l_n' = -sum_s sign(w_n - w_s) l_n |l_s|^2 W[n, s]``.  For one pair the
    result is the secular equation multiplied by a common complex factor; at
    exact resonance that factor is real.  Summing over a dense isotropic mode
    continuum reproduces the emission constant (see :func:`mode_integrated_rate`).
    """
    lam = np.asarray(lam, dtype=np.complex128)
    weights = _resonant_weights(sys, modeset, t, include_counter_rotating)
    w = sys.frequencies
    sign = np.sign(w[:, None] - w[None, :])
    return -lam * ((sign * weights) @ (np.abs(lam) ** 2))


def mode_integrated_rate(sys: LevelSystem, n: int, s: int, volume: float = 1.0, half_window: float = 100.0) -> float:
    """Resonant growth rate of the lower level from a continuum of field modes.

    Modes of a box of volume ``volume`` have density ``volume w^2 / (8 pi^3 C^3)``
    per unit frequency and solid angle; two transverse polarizations and the
    angular average turn ``|r . I|^2`` into ``(8 pi / 3) |r|^2``.  The
    Lorentzian ``y / (x^2 + y^2)`` is integrated over ``half_window`` line
    widths either side of the transition, and its ``1/x^2`` tails beyond are
    added in closed form.  The smooth off-resonant background grows with
    frequency and is not part of the line, so it is left out.  The result
    approaches ``A`` with relative error of order ``half_window * tau * w_ns``.
    """
    k = sys.constants
    tau = k.friction_time
    wc = abs(sys.frequencies[s] - sys.frequencies[n])
    strength = float(sys.pair_strength()[n, s])
    span = half_window * tau * wc**2
    if span >= wc:
        raise ValueError("line window reaches zero frequency; tau * w_ns is too large")

    def integrand(w):
        x = w * w - wc * wc
        y = tau * w**3
        return w**4 * y / (x * x + y * y)

    core, _ = integrate.quad(integrand, wc - span, wc + span, points=[wc], limit=1000, epsabs=0.0, epsrel=1e-12)
    line = core + wc**3 / (2.0 * half_window)
    density = volume / (8.0 * math.pi**3 * k.c**3) * (8.0 * math.pi / 3.0) * strength
    return 4.0 * math.pi * k.e2 / (k.hbar * volume) * density * line


def photon_amplitude(omega: float, k: PhysicalConstants) -> float:
    """Zero-point oscillation amplitude ``sqrt(hbar / (2 m w))``."""
    return math.sqrt(k.hbar / (2.0 * k.m * omega))


def dipole_expectation(sys: LevelSystem, modeset: ModeSet, lam, t: float) -> np.ndarray:
    """Expectation of the forced dipole moment, complex 3-vector.

    ``sum_q sum_{p,l} conj(l_p) l_l e^{i(w_p - w_l)t} (e^2/m) E_q I_q
    (r_pl . I_q / r0_q) [conj(alpha) e^{iwt} / D- + alpha e^{-iwt} / D+]``,
    with ``E_q = sqrt(2 pi hbar w / (V eps0))``, ``r0_q = sqrt(hbar / (2 m w))``
    and ``D+- = w^2 - wc^2 +- i tau w^3``.  The dipole approximation drops the
    ``exp(+-i q.r)`` factors inside the matrix elements.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    TwoLevelState(lam).check_normalized()
    k = sys.constants
    tau = k.friction_time
    out = np.zeros(3, dtype=np.complex128)
    if not modeset.modes:
        return out
    w_lv = sys.frequencies
    rho = np.conj(lam)[:, None] * lam[None, :] * np.exp(1j * (w_lv[:, None] - w_lv[None, :]) * t)
    wc = w_lv[-1] - w_lv[0]
    for mode in modeset.modes:
        w = mode.omega
        e_q = math.sqrt(2.0 * math.pi * k.hbar * w / (modeset.volume * k.eps0))
        proj = np.einsum("plj,j->pl", sys.dipole, mode.polarization) / photon_amplitude(w, k)
        d_plus = w * w - wc * wc + 1j * tau * w**3
        drive = np.conj(mode.alpha) * np.exp(1j * w * t) / np.conj(d_plus) + mode.alpha * np.exp(-1j * w * t) / d_plus
        out += (k.e2 * 4.0 * math.pi * k.eps0 / k.m) * e_q * np.sum(rho * proj) * drive * mode.polarization
    return out


def hydrogen_1s_2p_dipole(k: Optional[PhysicalConstants] = None) -> float:
    """``|<1s|z|2p0>|`` by numerical radial integration, in units of the Bohr radius of ``k``.

    Radial functions ``R10 = 2 e^{-r}``, ``R21 = r e^{-r/2} / sqrt(24)`` (r in
    Bohr radii); the angular factor of ``z`` between l = 0 and l = 1, m = 0 is
    ``1/sqrt(3)``.
    """
    k = make_constants() if k is None else k
    bohr = k.hbar**2 / (k.m * k.e2)

    def integrand(r):
        return 2.0 * math.exp(-r) * r * math.exp(-r / 2.0) / math.sqrt(24.0) * r**3

    radial, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-13)
    return radial / math.sqrt(3.0) * bohr
