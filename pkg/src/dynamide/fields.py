"""Plane-wave field modes of the polarized dynamide lattice.

Operators are replaced by complex coherent amplitudes ``alpha`` when fields
are evaluated, so with phase ``phi = w t - q.r``::

    {a+ e^{i phi} + a e^{-i phi}}  ->  2 Re(conj(alpha) e^{i phi})
    {a+ e^{i phi} - a e^{-i phi}}  ->  2i Im(conj(alpha) e^{i phi})

Expectation values (the field momentum) use the integer occupation ``n``
instead, with <a+ a + a a+> = 2n + 1 and <a+ a+> = <a a> = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .constants import PhysicalConstants

__all__ = [
    "FieldMode",
    "ModeSet",
    "FieldSnapshot",
    "FIELD_ORDER",
    "displacement_field",
    "polarization_field",
    "electric_field",
    "vector_potential",
    "vector_potential_g2",
    "magnetic_field",
    "triple_product",
    "lorentz_force_density",
    "poynting_momentum_density",
    "mode_momentum_expectation",
    "phase_velocity",
    "field_snapshot",
    "field_scan",
    "time_derivative",
    "curl",
    "random_mode_set",
]

FIELD_ORDER = ("u", "P", "E", "A", "H", "S")


@dataclass(frozen=True)
class FieldMode:
    """One plane-wave mode.  ``q`` and ``polarization`` are 3-vectors."""

    q: np.ndarray
    polarization: np.ndarray
    omega: float
    alpha: complex = 0.0
    n: int = 0

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64).reshape(3)
        pol = np.asarray(self.polarization, dtype=np.float64).reshape(3)
        qn = float(np.linalg.norm(q))
        if qn == 0.0:
            raise ValueError("mode wavevector must be non-zero")
        if abs(float(np.linalg.norm(pol)) - 1.0) > 1e-12:
            raise ValueError("polarization must be a unit vector")
        if abs(float(pol @ q)) > 1e-12 * qn:
            raise ValueError("polarization must be transverse to q")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("occupation n must be a non-negative integer")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "polarization", pol)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def along(cls, q: Sequence[float], polarization: Sequence[float], c: float, alpha: complex = 0.0, n: int = 0) -> "FieldMode":
        """Mode on the light cone, ``omega = c |q|``."""
        q = np.asarray(q, dtype=np.float64)
        return cls(q, polarization, c * float(np.linalg.norm(q)), alpha, n)

    @property
    def direction(self) -> np.ndarray:
        return self.q / np.linalg.norm(self.q)


@dataclass(frozen=True)
class ModeSet:
    """Modes plus the volumes they are normalized in (``volume = n_cells * cell_volume``)."""

    modes: tuple
    constants: PhysicalConstants
    cell_volume: float = 1.0
    n_cells: int = 1

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        if not self.cell_volume > 0 or self.n_cells < 1:
            raise ValueError("cell_volume must be positive and n_cells >= 1")
        c = self.constants.c
        keys = set()
        for mode in modes:
            if abs(mode.omega - c * np.linalg.norm(mode.q)) > 1e-12 * mode.omega:
                raise ValueError("every mode must satisfy omega = C |q|")
            key = (tuple(np.round(mode.q, 15)), tuple(np.round(mode.polarization, 15)))
            if key in keys:
                raise ValueError("duplicate (q, polarization) mode")
            keys.add(key)

    @property
    def volume(self) -> float:
        return self.n_cells * self.cell_volume

    def _arrays(self):
        if not self.modes:
            z = np.zeros((0, 3))
            return z, z, np.zeros(0), np.zeros(0, dtype=np.complex128)
        q = np.array([m.q for m in self.modes])
        pol = np.array([m.polarization for m in self.modes])
        w = np.array([m.omega for m in self.modes])
        a = np.array([m.alpha for m in self.modes], dtype=np.complex128)
        return q, pol, w, a

    def __len__(self):
        return len(self.modes)


@dataclass(frozen=True)
class FieldSnapshot:
    u: np.ndarray
    P: np.ndarray
    E: np.ndarray
    A: np.ndarray
    H: np.ndarray
    S: np.ndarray
    provenance: ModeSet = field(repr=False, compare=False, default=None)


def _brackets(ms: ModeSet, r, t):
    q, pol, w, a = ms._arrays()
    phase = w * t - q @ np.asarray(r, dtype=np.float64)
    z = np.conj(a) * np.exp(1j * phase)
    return q, pol, w, 2.0 * z.real, 2.0 * z.imag


def displacement_field(ms: ModeSet, r, t: float) -> np.ndarray:
    """Charge displacement ``u(r, t)``."""
    k = ms.constants
    q, pol, w, re2, _ = _brackets(ms, r, t)
    coef = np.sqrt(k.hbar / (2.0 * k.theta * w)) * re2 / math.sqrt(ms.n_cells)
    return coef @ pol if len(w) else np.zeros(3)


def polarization_field(ms: ModeSet, r, t: float) -> np.ndarray:
    """Lattice polarization, ``(2e / V0) u``."""
    return (2.0 * ms.constants.e / ms.cell_volume) * displacement_field(ms, r, t)


def _e_prefactor(ms: ModeSet, w):
    k = ms.constants
    return np.sqrt(2.0 * math.pi * k.hbar * w / (ms.volume * k.eps0))


def electric_field(ms: ModeSet, r, t: float) -> np.ndarray:
    q, pol, w, re2, _ = _brackets(ms, r, t)
    if not len(w):
        return np.zeros(3)
    return (_e_prefactor(ms, w) * re2) @ pol


def vector_potential(ms: ModeSet, r, t: float) -> np.ndarray:
    """Vector potential with the ``sqrt(2 pi hbar / (V w eps0))`` prefactor.

    ``i * 2i Im(...)`` makes the bracket real: ``A = -sum c_A I 2 Im(conj(alpha) e^{i phi})``.
    """
    k = ms.constants
    q, pol, w, _, im2 = _brackets(ms, r, t)
    if not len(w):
        return np.zeros(3)
    pref = np.sqrt(2.0 * math.pi * k.hbar / (ms.volume * w * k.eps0))
    return -(pref * im2) @ pol


def vector_potential_prefactors(ms: ModeSet) -> tuple:
    """Per-mode prefactors of the two vector-potential forms (eps0 form, mu0/q^2 form)."""
    k = ms.constants
    q, pol, w, a = ms._arrays()
    q2 = np.einsum("ij,ij->i", q, q)
    g1 = np.sqrt(2.0 * math.pi * k.hbar / (ms.volume * w * k.eps0))
    g2 = np.sqrt(2.0 * math.pi * k.hbar * w * k.mu0 / (ms.volume * q2))
    return g1, g2


def vector_potential_g2(ms: ModeSet, r, t: float) -> np.ndarray:
    """Vector potential evaluated with the ``sqrt(2 pi hbar w mu0 / (V q^2))`` prefactor."""
    q, pol, w, _, im2 = _brackets(ms, r, t)
    if not len(w):
        return np.zeros(3)
    _, g2 = vector_potential_prefactors(ms)
    return -(g2 * im2) @ pol


def magnetic_field(ms: ModeSet, r, t: float) -> np.ndarray:
    k = ms.constants
    q, pol, w, re2, _ = _brackets(ms, r, t)
    if not len(w):
        return np.zeros(3)
    n_hat = q / np.linalg.norm(q, axis=1)[:, None]
    pref = np.sqrt(2.0 * math.pi * k.hbar * w / (ms.volume * k.mu0))
    return (pref * re2) @ np.cross(n_hat, pol)


def triple_product(v, n, pol) -> np.ndarray:
    """``n (v.I) - I (v.n)``, the expansion of ``v x (n x I)``."""
    v = np.asarray(v, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    pol = np.asarray(pol, dtype=np.float64)
    return n * np.dot(v, pol) - pol * np.dot(v, n)


def lorentz_force_density(ms: ModeSet, charge_velocity, r, t: float) -> np.ndarray:
    """Magnetic force ``(e/C) v x H`` on a charge moving through the modes."""
    k = ms.constants
    return (k.e / k.c) * np.cross(np.asarray(charge_velocity, dtype=np.float64), magnetic_field(ms, r, t))


def poynting_momentum_density(ms: ModeSet, r, t: float) -> np.ndarray:
    """Field momentum density ``(E x H) / (4 pi C^2)``."""
    k = ms.constants
    return np.cross(electric_field(ms, r, t), magnetic_field(ms, r, t)) / (4.0 * math.pi * k.c**2)


def mode_momentum_expectation(ms: ModeSet) -> np.ndarray:
    """Number-state momentum ``sum n_hat (hbar w / (V C)) (n + 1/2)``."""
    k = ms.constants
    total = np.zeros(3)
    for mode in ms.modes:
        total += mode.direction * (k.hbar * mode.omega / (ms.volume * k.c)) * (mode.n + 0.5)
    return total


def phase_velocity(eps: float, mu: float, k: PhysicalConstants) -> float:
    if not (eps > 0 and mu > 0):
        raise ValueError("relative permittivity and permeability must be positive")
    return k.c / math.sqrt(eps * mu)


def field_snapshot(ms: ModeSet, r, t: float) -> FieldSnapshot:
    return FieldSnapshot(
        u=displacement_field(ms, r, t),
        P=polarization_field(ms, r, t),
        E=electric_field(ms, r, t),
        A=vector_potential(ms, r, t),
        H=magnetic_field(ms, r, t),
        S=poynting_momentum_density(ms, r, t),
        provenance=ms,
    )


_EVALUATORS = {
    "u": displacement_field,
    "P": polarization_field,
    "E": electric_field,
    "A": vector_potential,
    "H": magnetic_field,
    "S": poynting_momentum_density,
}


def field_scan(ms: ModeSet, times: Iterable[float], positions: Iterable[Sequence[float]], fields: Iterable[str] = FIELD_ORDER):
    """Rows for a field scan CSV and the matching column names.

    Rows are ordered by time, then by position in the order given.  Requested
    fields are always emitted in the fixed order u, P, E, A, H, S.
    """
    wanted = set(fields)
    unknown = wanted - set(FIELD_ORDER)
    if unknown:
        raise ValueError(f"unknown field(s): {sorted(unknown)}")
    chosen = [name for name in FIELD_ORDER if name in wanted]
    columns = ["t", "r_x", "r_y", "r_z"] + [f"{name}_{c}" for name in chosen for c in "xyz"]
    positions = [np.asarray(p, dtype=np.float64).reshape(3) for p in positions]
    rows = []
    for t in times:
        for r in positions:
            row = [float(t), *map(float, r)]
            for name in chosen:
                row.extend(float(x) for x in _EVALUATORS[name](ms, r, t))
            rows.append(row)
    return columns, rows


# -- finite-difference oracles ---------------------------------------------

def time_derivative(fn, ms: ModeSet, r, t: float, h: float) -> np.ndarray:
    """Second-order central difference of ``fn(ms, r, t)`` in ``t``."""
    return (fn(ms, r, t + h) - fn(ms, r, t - h)) / (2.0 * h)


def curl(fn, ms: ModeSet, r, t: float, h: float) -> np.ndarray:
    """Central-difference curl of the vector field ``fn(ms, r, t)``."""
    r = np.asarray(r, dtype=np.float64)
    jac = np.empty((3, 3))  # jac[i, j] = d F_i / d x_j
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        jac[:, j] = (fn(ms, r + step, t) - fn(ms, r - step, t)) / (2.0 * h)
    return np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])


def random_mode_set(rng: np.random.Generator, n_modes: int, k: PhysicalConstants, cell_volume: float = 1.0, n_cells: int = 1,
                    q_range=(0.5, 3.0)) -> ModeSet:
    """Random transverse modes on the light cone with complex amplitudes and small occupations."""
    modes = []
    for _ in range(n_modes):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        q = direction * rng.uniform(*q_range)
        trial = rng.normal(size=3)
        pol = trial - direction * (trial @ direction)
        pol /= np.linalg.norm(pol)
        pol = pol - direction * (pol @ direction)
        pol /= np.linalg.norm(pol)
        alpha = complex(rng.normal(), rng.normal())
        modes.append(FieldMode.along(q, pol, k.c, alpha, int(rng.integers(0, 5))))
    return ModeSet(tuple(modes), k, cell_volume, n_cells)
