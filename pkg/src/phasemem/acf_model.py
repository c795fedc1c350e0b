"""Analytic correlation functions of the slow phase-relaxation model.

Energies are in MeV throughout. The cross-section autocorrelation is

    C(eps) = exp[-eps^2 / 2 (hw d)^2] * Re X(eps) / Re X(0)

    X(eps) = exp[i k |eps| / z] / (1 - exp[i k (|eps| + i Gamma) / z])

with ``z = hw - i beta``. The phase constant ``k`` is ``pi`` as printed in
the original closed form; ``2 pi`` is offered as a switch because only then
is the oscillation period equal to ``hw`` (with ``pi`` it is ``2 hw``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError


class PhaseConstant(str, enum.Enum):
    AS_PRINTED_PI = "pi"
    TWO_PI = "two_pi"

    @property
    def value_rad(self):
        return math.pi if self is PhaseConstant.AS_PRINTED_PI else 2.0 * math.pi

    @classmethod
    def parse(cls, s):
        if isinstance(s, cls):
            return s
        aliases = {"pi": cls.AS_PRINTED_PI, "as_printed_pi": cls.AS_PRINTED_PI,
                   "two_pi": cls.TWO_PI, "2pi": cls.TWO_PI}
        try:
            return aliases[str(s).lower()]
        except KeyError:
            raise ConfigError(f"unknown phase constant {s!r}") from None


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    beta: float
    hbar_omega: float
    d: float
    phase_constant: PhaseConstant = PhaseConstant.AS_PRINTED_PI

    def __post_init__(self):
        object.__setattr__(self, "phase_constant", PhaseConstant.parse(self.phase_constant))
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if not self.beta >= 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if not self.hbar_omega > 0:
            raise ConfigError(f"hbar_omega must be > 0, got {self.hbar_omega}")
        if not self.d >= 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")

    def with_(self, **kw):
        return replace(self, **kw)

    def as_dict(self):
        return {"gamma_MeV": self.gamma, "beta_MeV": self.beta,
                "hbar_omega_MeV": self.hbar_omega, "d": self.d,
                "phase_constant": self.phase_constant.value}


@dataclass(frozen=True)
class CorrelationSeries:
    epsilon_values: np.ndarray
    c_values: np.ndarray
    stderr_values: Optional[np.ndarray] = None

    def __post_init__(self):
        eps = np.asarray(self.epsilon_values, dtype=float)
        c = np.asarray(self.c_values, dtype=float)
        if eps.ndim != 1 or eps.shape != c.shape or eps.size == 0:
            raise ConfigError("epsilon and C must be equal-length 1-d sequences")
        if eps[0] != 0.0:
            raise ConfigError("correlation series must start at epsilon = 0")
        if np.any(np.diff(eps) <= 0):
            raise ConfigError("epsilon values must be strictly increasing")
        object.__setattr__(self, "epsilon_values", eps)
        object.__setattr__(self, "c_values", c)
        if self.stderr_values is not None:
            se = np.asarray(self.stderr_values, dtype=float)
            if se.shape != eps.shape or np.any(se < 0):
                raise ConfigError("stderr must be nonnegative and match epsilon")
            object.__setattr__(self, "stderr_values", se)

    def __len__(self):
        return self.epsilon_values.size

    def normalized(self):
        """Copy scaled so that C(0) = 1."""
        c0 = self.c_values[0]
        if c0 == 0:
            raise DomainError("cannot normalize a series with C(0) = 0")
        se = None if self.stderr_values is None else self.stderr_values / abs(c0)
        return CorrelationSeries(self.epsilon_values, self.c_values / c0, se)


def smatrix_kernel(delta_j, epsilon, params: ModelParams):
    """Spin off-diagonal correlation <dS^J(E+eps) dS^J'(E)*> for J - J' = delta_j."""
    dj = np.asarray(delta_j, dtype=float)
    eps = np.asarray(epsilon, dtype=float)
    den = params.gamma + params.beta * np.abs(dj) + 1j * params.hbar_omega * dj - 1j * eps
    out = params.gamma / den
    return complex(out) if out.ndim == 0 else out


def _oscillating_factor(eps_abs, gamma, beta, hbar_omega, kc):
    z = hbar_omega - 1j * beta
    num = np.exp(1j * kc * eps_abs / z)
    den = 1.0 - np.exp(1j * kc * (eps_abs + 1j * gamma) / z)
    return (num / den).real


def model_acf_arrays(epsilon, gamma, beta, hbar_omega, d, kc=math.pi):
    """Broadcasting kernel behind :func:`model_acf`.

    All parameter arguments may be arrays; no validation is done here.
    """
    eps = np.abs(np.asarray(epsilon, dtype=float))
    gamma = np.asarray(gamma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    hbar_omega = np.asarray(hbar_omega, dtype=float)
    d = np.asarray(d, dtype=float)
    envelope = np.exp(-(eps ** 2) / (2.0 * (hbar_omega * d) ** 2))
    ref = _oscillating_factor(0.0, gamma, beta, hbar_omega, kc)
    return envelope * _oscillating_factor(eps, gamma, beta, hbar_omega, kc) / ref


def oscillating_factor(epsilon, params: ModelParams):
    """``Re X(eps) / Re X(0)``: the ACF with the Gaussian envelope removed."""
    eps = np.abs(np.asarray(epsilon, dtype=float))
    kc = params.phase_constant.value_rad
    args = (params.gamma, params.beta, params.hbar_omega, kc)
    out = _oscillating_factor(eps, *args) / _oscillating_factor(0.0, *args)
    return float(out) if out.ndim == 0 else out


def model_acf(epsilon, params: ModelParams):
    """Normalized cross-section energy autocorrelation, ``C(0) = 1``.

    Accepts a scalar or an array of lags; negative lags map through ``|eps|``.
    """
    out = model_acf_arrays(epsilon, params.gamma, params.beta, params.hbar_omega,
                           params.d, params.phase_constant.value_rad)
    return float(out) if out.ndim == 0 else out


def lorentzian_acf(epsilon, gamma):
    """Random-matrix limit ``1 / (1 + (eps/Gamma)^2)``."""
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    eps = np.asarray(epsilon, dtype=float)
    out = 1.0 / (1.0 + (eps / gamma) ** 2)
    return float(out) if out.ndim == 0 else out


def peak_spacing(params: ModelParams, scan_range, scan_step, prominence=1e-9):
    """Mean spacing of local maxima of the envelope-free ACF on (0, scan_range].

    Maxima are located on the scan grid and refined by a three-point
    parabola. Maxima less than ``prominence`` (relative to C(0) = 1) above
    both neighbouring minima are ignored. Returns None with fewer than two.
    """
    if not scan_range > 0:
        raise DomainError(f"scan_range must be positive, got {scan_range}")
    if not 0 < scan_step < params.hbar_omega / 20:
        raise DomainError("scan_step must be in (0, hbar_omega/20)")
    n = int(math.floor(scan_range / scan_step + 1e-9))
    eps = scan_step * np.arange(n + 1)
    f = oscillating_factor(eps, params)
    peaks = []
    for k in range(1, n):
        if f[k] > f[k - 1] and f[k] >= f[k + 1]:
            left = f[: k + 1][::-1]
            right = f[k:]
            # depth of the valley on each side before the curve rises again
            lmin = left[: _run_down(left)].min()
            rmin = right[: _run_down(right)].min()
            if f[k] - max(lmin, rmin) < prominence:
                continue
            den = f[k - 1] - 2 * f[k] + f[k + 1]
            shift = 0.5 * (f[k - 1] - f[k + 1]) / den if den != 0 else 0.0
            peaks.append(eps[k] + shift * scan_step)
    if len(peaks) < 2:
        return None
    return float(np.mean(np.diff(peaks)))


def _run_down(seq):
    """Length of the initial non-increasing run of ``seq``."""
    k = 1
    while k < len(seq) and seq[k] <= seq[k - 1]:
        k += 1
    return k
