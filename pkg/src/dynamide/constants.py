"""Unit systems, physical constants and the closed-form frequency relations.

Internal computation runs in natural units (hbar = C = e = m = 1 and
eps0 = 1/(4 pi), so that 4 pi eps0 = 1 and Gaussian-style formulas read the
same as SI-style ones).  The SI system is provided for boundary conversions and
for quantities whose SI value is itself a check (the Thomson cross-section).

Formulas written in Gaussian form (friction force, Thomson cross-section,
emission constant) use :attr:`PhysicalConstants.e2`, the Gaussian charge
squared ``e**2 / (4 pi eps0)``.  In natural units it is simply ``e**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "UnitSystem",
    "PhysicalConstants",
    "SpringParams",
    "make_constants",
    "internal_mode_frequency",
    "collective_mode_frequency",
    "charge_frequency",
    "charge_wavevector",
]


class UnitSystem(str, Enum):
    NATURAL = "natural"
    SI = "si"


# CODATA 2018 (exact where the 2019 SI redefinition fixes the value).
_SI_C = 299_792_458.0
_SI_E = 1.602_176_634e-19
_SI_HBAR = 1.054_571_817e-34
_SI_M_E = 9.109_383_7015e-31
_SI_EPS0 = 8.854_187_8128e-12


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants of one unit system.

    ``theta`` is the inertial mass of a single electrino/positrino.  The model
    never pins it, so it defaults to the electron mass of the system.
    """

    e: float
    m: float
    theta: float
    hbar: float
    c: float
    eps0: float
    mu0: float
    system: UnitSystem = UnitSystem.NATURAL

    def __post_init__(self):
        for name in ("e", "m", "theta", "hbar", "c", "eps0", "mu0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
        mismatch = abs(self.c * math.sqrt(self.eps0 * self.mu0) - 1.0)
        if mismatch > 1e-12:
            raise ValueError(f"C*sqrt(eps0*mu0) deviates from 1 by {mismatch:.3e}")

    @property
    def e2(self) -> float:
        """Gaussian charge squared, ``e**2 / (4 pi eps0)``."""
        return self.e**2 / (4.0 * math.pi * self.eps0)

    @property
    def friction_time(self) -> float:
        """Lorentz friction time ``(2/3) e^2 / (m C^3)``."""
        return 2.0 * self.e2 / (3.0 * self.m * self.c**3)

    @property
    def classical_radius(self) -> float:
        return self.e2 / (self.m * self.c**2)

    def with_theta(self, theta: float) -> "PhysicalConstants":
        return PhysicalConstants(
            self.e, self.m, theta, self.hbar, self.c, self.eps0, self.mu0, self.system
        )


def make_constants(system: UnitSystem | str = UnitSystem.NATURAL, theta: float | None = None) -> PhysicalConstants:
    """Build the constants of ``system``; ``theta`` defaults to the electron mass."""
    system = UnitSystem(system)
    if system is UnitSystem.NATURAL:
        eps0 = 1.0 / (4.0 * math.pi)
        return PhysicalConstants(
            e=1.0, m=1.0, theta=1.0 if theta is None else theta,
            hbar=1.0, c=1.0, eps0=eps0, mu0=4.0 * math.pi, system=system,
        )
    # mu0 from eps0 and C keeps C*sqrt(eps0*mu0) == 1 to rounding; the CODATA
    # mu0 (1.25663706212e-6) agrees to its quoted digits.
    mu0 = 1.0 / (_SI_EPS0 * _SI_C**2)
    return PhysicalConstants(
        e=_SI_E, m=_SI_M_E, theta=_SI_M_E if theta is None else theta,
        hbar=_SI_HBAR, c=_SI_C, eps0=_SI_EPS0, mu0=mu0, system=system,
    )


@dataclass(frozen=True)
class SpringParams:
    """Spring constants and cell geometry of the dynamide lattice.

    ``chi_tilde`` binds the two charges of one dynamide, ``chi`` couples
    neighbouring dynamides.  ``total_volume`` is derived as ``n_cells * cell_volume``.
    """

    chi: float
    chi_tilde: float
    theta: float
    cell_volume: float = 1.0
    n_cells: int = 1

    def __post_init__(self):
        if self.chi < 0 or self.chi_tilde < 0:
            raise ValueError("spring constants must be non-negative")
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if not self.cell_volume > 0:
            raise ValueError("cell_volume must be positive")
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError("n_cells must be an integer >= 1")

    @property
    def total_volume(self) -> float:
        return self.n_cells * self.cell_volume


def internal_mode_frequency(p: SpringParams) -> float:
    """Frequency of the isolated dynamide, ``sqrt(2 chi_tilde / theta)``."""
    return math.sqrt(2.0 * p.chi_tilde / p.theta)


def collective_mode_frequency(p: SpringParams) -> float:
    """Collective frequency ``sqrt(4 chi / (2 theta))``."""
    return math.sqrt(4.0 * p.chi / (2.0 * p.theta))


def charge_frequency(p: SpringParams, k: PhysicalConstants) -> float:
    """Frequency fixed by the Coulomb binding, ``theta w^2 = 4 e^2 / (4 pi V0 eps0)``.

    Uses the raw charge ``e`` and ``eps0`` as written; meaningful in natural
    units.  The SI evaluation is dimensionally unbalanced and is not checked.
    """
    return math.sqrt(k.e**2 / (math.pi * p.cell_volume * k.eps0 * p.theta))


def charge_wavevector(p: SpringParams, k: PhysicalConstants) -> float:
    """Wavevector ``q`` solving ``theta C^2 = e^2 / (4 pi V0 q^2 eps0)``."""
    return math.sqrt(k.e**2 / (4.0 * math.pi * p.cell_volume * k.eps0 * p.theta * k.c**2))
