"""One-dimensional periodic chain of dynamides.

Each cell carries two opposite charges of inertial mass ``theta`` with
displacements ``u-`` and ``u+``.  The intra-dynamide spring ``chi_tilde``
binds ``u-[j]`` to ``u+[j]``; the inter-dynamide coupling is a spring of
constant ``chi/2`` from ``u+[j]`` to ``u-[j+1]``.  With that bond the
zone-centre optical frequency is ``w^2 = (2 chi_tilde + chi) / theta``, which
reduces to the isolated-dynamide value ``2 chi_tilde / theta`` at ``chi = 0``
and to twice that value at ``chi = 2 chi_tilde``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .constants import SpringParams

__all__ = [
    "LatticeConfig",
    "ChainState",
    "ChainTrajectory",
    "ModeTable",
    "build_chain",
    "dynamical_matrix",
    "branch_frequencies",
    "mode_frequencies",
    "max_frequency",
    "verlet_step",
    "integrate_chain",
    "total_energy",
    "chain_momentum",
    "measured_spectrum",
    "spectrum_bin_width",
]

ACOUSTIC = "acoustic"
OPTICAL = "optical"

# velocity Verlet is accepted up to dt * w_max < 0.1
STABILITY_LIMIT = 0.1


@dataclass(frozen=True)
class LatticeConfig:
    n_cells: int
    springs: SpringParams
    spacing: float = 1.0
    boundary: str = "periodic"

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError("n_cells must be an integer >= 2")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")

    @property
    def theta(self) -> float:
        return self.springs.theta

    @property
    def bond(self) -> float:
        """Inter-dynamide bond constant, ``chi / 2``."""
        return 0.5 * self.springs.chi

    @property
    def zone_edge(self) -> float:
        return math.pi / self.spacing


@dataclass(frozen=True)
class ChainState:
    """Displacements and velocities, shape ``(n_cells, 2)``; column 0 is u-, column 1 is u+."""

    displacements: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        u = np.array(self.displacements, dtype=np.float64)
        v = np.array(self.velocities, dtype=np.float64)
        if u.ndim != 2 or u.shape[1] != 2 or u.shape != v.shape:
            raise ValueError("displacements and velocities must both have shape (n_cells, 2)")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("chain state must be finite")
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "displacements", u)
        object.__setattr__(self, "velocities", v)

    @property
    def n_cells(self) -> int:
        return self.displacements.shape[0]

    @property
    def relative(self) -> np.ndarray:
        """Per-cell dipole stretch ``u+ - u-``."""
        return self.displacements[:, 1] - self.displacements[:, 0]


@dataclass(frozen=True)
class ChainTrajectory:
    """Uniformly sampled chain history; ``displacements`` has shape ``(n_t, n_cells, 2)``."""

    times: np.ndarray
    displacements: np.ndarray
    velocities: np.ndarray
    energies: Optional[np.ndarray] = None

    def state(self, i: int) -> ChainState:
        return ChainState(self.displacements[i], self.velocities[i], float(self.times[i]))

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class ModeTable:
    q: np.ndarray
    omega_acoustic: np.ndarray
    omega_optical: np.ndarray

    columns = ("q", "omega_acoustic", "omega_optical")

    def rows(self):
        return [tuple(float(x) for x in row) for row in zip(self.q, self.omega_acoustic, self.omega_optical)]

    def row_at(self, q: float) -> tuple:
        i = int(np.argmin(np.abs(self.q - q)))
        return float(self.q[i]), float(self.omega_acoustic[i]), float(self.omega_optical[i])


def dynamical_matrix(config: LatticeConfig, q: float) -> np.ndarray:
    """Mass-weighted force-constant matrix at wavevector ``q`` (basis u-, u+).

    Hermitian; real symmetric at ``q = 0`` and at the zone edge.
    """
    _check_zone(config, q)
    ct = config.springs.chi_tilde
    k = config.bond
    phase = np.exp(1j * q * config.spacing)
    d = np.array(
        [[ct + k, -ct - k / phase],
         [-ct - k * phase, ct + k]],
        dtype=np.complex128,
    )
    return d / config.theta


def branch_frequencies(config: LatticeConfig, q: float) -> tuple:
    """(acoustic, optical) angular frequencies at ``q`` from the eigenvalues."""
    w2 = np.linalg.eigvalsh(dynamical_matrix(config, q))
    w2 = np.clip(w2, 0.0, None)
    return float(np.sqrt(w2[0])), float(np.sqrt(w2[1]))


def max_frequency(config: LatticeConfig) -> float:
    """Highest normal-mode frequency of the chain (optical branch at q = 0)."""
    return math.sqrt(2.0 * (config.springs.chi_tilde + config.bond) / config.theta)


def mode_frequencies(config: LatticeConfig, q_samples: int) -> ModeTable:
    """Dispersion table on the grid ``q_m = 2 pi m / (q_samples * spacing)``.

    ``m`` runs over ``-floor(q_samples/2) .. q_samples - 1 - floor(q_samples/2)``,
    so the grid always contains ``q = 0`` and is symmetric about it (the
    point ``-pi/a`` appears alone when ``q_samples`` is even).
    """
    if q_samples < 2:
        raise ValueError("q_samples must be >= 2")
    m = np.arange(q_samples) - q_samples // 2
    q = 2.0 * math.pi * m / (q_samples * config.spacing)
    ac = np.empty(q_samples)
    op = np.empty(q_samples)
    for i, qi in enumerate(q):
        ac[i], op[i] = branch_frequencies(config, float(qi))
    # translational invariance: the acoustic branch is exactly zero at q = 0
    ac[m == 0] = 0.0
    return ModeTable(q, ac, op)


def _check_zone(config: LatticeConfig, q: float) -> None:
    if abs(q) > config.zone_edge * (1.0 + 1e-12):
        raise ValueError(f"q = {q} lies outside the first Brillouin zone |q| <= {config.zone_edge}")


def _mode_shape(config: LatticeConfig, q: float, branch: str) -> np.ndarray:
    w2, vecs = np.linalg.eigh(dynamical_matrix(config, q))
    vec = vecs[:, 0 if branch == ACOUSTIC else 1]
    if branch == OPTICAL:
        scale = abs(vec[1] - vec[0])
    else:
        scale = abs(vec[1] + vec[0]) / 2.0
    if scale < 1e-12:
        scale = float(np.linalg.norm(vec))
    # remove the arbitrary global phase so the u+ component is real positive
    ref = vec[1] if abs(vec[1]) > 1e-12 else vec[0]
    return vec * (abs(ref) / ref) / scale


def build_chain(config: LatticeConfig, seed_mode: Optional[Sequence] = None) -> ChainState:
    """Zero state, or a standing normal mode ``(q, amplitude, branch)`` at rest.

    Optical seeds are normalized so the dipole stretch ``u+ - u-`` has the
    given amplitude; acoustic seeds so the cell centre does.  ``q`` must be
    one of the wavevectors the periodic chain supports, ``2 pi m / (n_cells a)``.
    """
    n = config.n_cells
    zero = np.zeros((n, 2))
    if seed_mode is None:
        return ChainState(zero, zero.copy())
    q, amplitude, branch = seed_mode
    branch = str(branch).lower()
    if branch not in (ACOUSTIC, OPTICAL):
        raise ValueError(f"unknown branch {branch!r}")
    _check_zone(config, q)
    m = q * n * config.spacing / (2.0 * math.pi)
    if abs(m - round(m)) > 1e-9:
        raise ValueError(f"q = {q} is not commensurate with a periodic chain of {n} cells")
    shape = _mode_shape(config, q, branch)
    x = np.arange(n) * config.spacing
    u = amplitude * np.real(shape[None, :] * np.exp(1j * q * x)[:, None])
    return ChainState(u, np.zeros_like(u))


def _check_dt(config: LatticeConfig, dt: float) -> None:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if dt * max_frequency(config) >= STABILITY_LIMIT:
        raise ValueError(
            f"dt * w_max = {dt * max_frequency(config):.4g} violates the stability bound {STABILITY_LIMIT}"
        )


def integrate_chain(state: ChainState, config: LatticeConfig, dt: float, n_steps: int, stride: int = 1) -> ChainTrajectory:
    """Run ``n_steps`` velocity-Verlet steps, keeping every ``stride``-th state.

    The energy is recorded at every step regardless of ``stride``.
    """
    _check_dt(config, dt)
    if state.n_cells != config.n_cells:
        raise ValueError("state does not match config.n_cells")
    if n_steps < 0 or stride < 1:
        raise ValueError("n_steps must be >= 0 and stride >= 1")
    u, v = state.displacements, state.velocities
    disp, vel, energy = kernels.verlet_chain(
        u[:, 0], u[:, 1], v[:, 0], v[:, 1],
        float(config.springs.chi_tilde), float(config.bond), float(config.theta),
        float(dt), int(n_steps), int(stride),
    )
    times = state.time + dt * stride * np.arange(disp.shape[0])
    return ChainTrajectory(times, disp, vel, energy)


def verlet_step(state: ChainState, config: LatticeConfig, dt: float) -> ChainState:
    traj = integrate_chain(state, config, dt, 1)
    return ChainState(traj.displacements[-1], traj.velocities[-1], state.time + dt)


def total_energy(state: ChainState, config: LatticeConfig) -> float:
    um, up = state.displacements[:, 0], state.displacements[:, 1]
    vm, vp = state.velocities[:, 0], state.velocities[:, 1]
    kinetic = 0.5 * config.theta * (vm @ vm + vp @ vp)
    stretch = up - um
    bond = np.roll(um, -1) - up
    return float(kinetic + 0.5 * config.springs.chi_tilde * stretch @ stretch + 0.5 * config.bond * bond @ bond)


def chain_momentum(state: ChainState, config: LatticeConfig) -> float:
    return float(config.theta * state.velocities.sum())


def spectrum_bin_width(n_samples: int, dt: float) -> float:
    """Angular-frequency resolution of an ``n_samples`` DFT at spacing ``dt``."""
    return 2.0 * math.pi / (n_samples * dt)


def measured_spectrum(trajectory: ChainTrajectory, cell: int, rel_threshold: float = 0.05, min_samples: int = 4096) -> np.ndarray:
    """Peak angular frequencies of the stretch ``u+ - u-`` of one cell.

    A Hann-windowed DFT is searched for local maxima whose amplitude exceeds
    ``rel_threshold`` of the largest one; each peak is refined by a parabolic
    fit through the log-amplitude of its neighbours.  Peaks are returned in
    ascending frequency.  A signal that is identically zero has no peaks.
    """
    t = np.asarray(trajectory.times, dtype=np.float64)
    if t.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {t.size}")
    steps = np.diff(t)
    dt = float(steps.mean())
    if not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
        raise ValueError("trajectory sampling is not uniform")
    x = trajectory.displacements[:, cell, 1] - trajectory.displacements[:, cell, 0]
    x = x - x.mean()
    if not np.any(x):
        return np.empty(0)
    amp = np.abs(np.fft.rfft(x * np.hanning(x.size)))
    top = amp.max()
    if top == 0.0:
        return np.empty(0)
    width = spectrum_bin_width(x.size, dt)
    peaks = []
    for i in range(1, amp.size - 1):
        if amp[i] >= rel_threshold * top and amp[i] > amp[i - 1] and amp[i] >= amp[i + 1]:
            a, b, c = np.log(amp[i - 1:i + 2] + 1e-300)
            denom = a - 2.0 * b + c
            shift = 0.5 * (a - c) / denom if denom != 0.0 else 0.0
            peaks.append((i + shift) * width)
    return np.asarray(peaks)

