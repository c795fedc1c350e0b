"""Spin-window kinematics and a rigid-rotor frequency estimate."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ConfigError, DomainError

AMU_MEV = 931.494
HBARC_MEV_FM = 197.327


@dataclass(frozen=True)
class WindowKinematics:
    i_bar: float
    e_bar: float
    barrier: float
    g: float

    def __post_init__(self):
        if not self.e_bar > self.barrier:
            raise ConfigError("center energy must exceed the Coulomb barrier")
        if not self.i_bar > 0:
            raise ConfigError("i_bar must be positive")
        if not self.g > 0:
            raise ConfigError("g must be positive")

    @property
    def delta_e(self):
        """Energy step per unit spin-slope, ``2 (E_bar - B) / I_bar`` (MeV)."""
        return 2.0 * (self.e_bar - self.barrier) / self.i_bar

    def center(self, e):
        """Linearized window center I(E)."""
        return self.i_bar + self.i_bar * (e - self.e_bar) / self.delta_e


def spin_window_params(k: WindowKinematics, hbar_omega, e):
    """Return ``(I(E), Delta E, d)`` with ``d = g / |1 - hbar_omega / Delta E|``."""
    de = k.delta_e
    denom = abs(1.0 - hbar_omega / de)
    if denom < 1e-9:
        raise DomainError("hbar_omega equals Delta E: effective width d diverges")
    return k.center(e), de, k.g / denom


class Elongation(str, enum.Enum):
    TOUCHING_SPHERES = "touching_spheres"


@dataclass(frozen=True)
class RotorGeometry:
    a1: int
    a2: int
    r0: float = 1.2
    include_sphere_self_inertia: bool = True

    def __post_init__(self):
        if self.a1 <= 0 or self.a2 <= 0:
            raise ConfigError("mass numbers must be positive")
        if not 1.0 <= self.r0 <= 1.5:
            raise ConfigError("r0 must lie in [1.0, 1.5] fm")


def rotor_frequency(geom: RotorGeometry, j, elongation=Elongation.TOUCHING_SPHERES):
    """Rigid-rotor quantum ``hbar omega = hbar^2 J / I`` for two touching spheres.

    Returns ``(hbar_omega_MeV, report)``; the report dict carries the
    separation, reduced mass and the inertia terms (MeV/c^2 fm^2).
    """
    if j < 0:
        raise DomainError("spin must be nonnegative")
    if Elongation(elongation) is not Elongation.TOUCHING_SPHERES:
        raise ConfigError(f"unsupported elongation {elongation!r}")
    r1 = geom.r0 * geom.a1 ** (1.0 / 3.0)
    r2 = geom.r0 * geom.a2 ** (1.0 / 3.0)
    sep = r1 + r2
    m1, m2 = geom.a1 * AMU_MEV, geom.a2 * AMU_MEV
    mu = m1 * m2 / (m1 + m2)
    orbital = mu * sep ** 2
    spheres = 0.4 * (m1 * r1 ** 2 + m2 * r2 ** 2) if geom.include_sphere_self_inertia else 0.0
    inertia = orbital + spheres
    hw = HBARC_MEV_FM ** 2 * j / inertia
    report = {
        "separation_fm": sep,
        "reduced_mass_MeV": mu,
        "orbital_inertia": orbital,
        "sphere_inertia": spheres,
        "total_inertia": inertia,
        "hbar_omega_MeV": hw,
    }
    return hw, report
