"""Time power spectrum of a damped quantum rotor.

Times are in units of hbar/MeV, so ``omega * t == hbar_omega * t`` and
``Gamma t / hbar == gamma * t``. One revolution takes ``T = 2 pi / hbar_omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .specfun import AngleGrid, SpinWindow, legendre_all

HBAR_MEV_S = 6.582119569e-22


@dataclass(frozen=True)
class RotorParams:
    gamma: float
    beta: float
    hbar_omega: float
    phi: float
    window: SpinWindow

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigError("gamma must be > 0")
        if not self.beta >= 0:
            raise ConfigError("beta must be >= 0")
        if not self.hbar_omega > 0:
            raise ConfigError("hbar_omega must be > 0")

    @property
    def period(self):
        """Revolution period T in hbar/MeV."""
        return 2.0 * math.pi / self.hbar_omega


@dataclass(frozen=True)
class TimePowerSpectrum:
    t_values: np.ndarray
    theta_grid: AngleGrid
    p: np.ndarray
    p_diag: np.ndarray
    ratio: np.ndarray


def _amplitudes(theta, window):
    """``sqrt(W(J)) P_J(cos theta)`` with shape (n_theta, n_J)."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    leg = legendre_all(np.cos(th), window.j_max)[window.j_min:]
    return (np.sqrt(window.weights())[:, None] * leg).T


def _coherence_matrix(t, p: RotorParams):
    """Complex ``exp[i(Phi - omega t) dJ - beta |dJ| t]`` over the window."""
    j = p.window.spins
    dj = (j[:, None] - j[None, :]).astype(float)
    return np.exp(1j * (p.phi - p.hbar_omega * t) * dj - p.beta * np.abs(dj) * t)


def _spectrum(t, theta, params):
    """Quadratic form ``a^H M a`` evaluated as a sum of squared moduli.

    ``M[J, J'] = rho^|J - J'|`` with ``rho = exp(-beta t)`` factors as
    ``L L^T`` with the AR(1) Cholesky factor, so the result is nonnegative
    by construction rather than up to rounding.
    """
    v = _amplitudes(theta, params.window)
    if t < 0:
        return np.zeros(v.shape[0])
    j = (params.window.spins - params.window.j_min).astype(float)
    a = v * np.exp(1j * (params.phi - params.hbar_omega * t) * j)[None, :]
    rho = math.exp(-params.beta * t)
    s2 = -math.expm1(-2.0 * params.beta * t)
    c = a[:, -1].copy()
    tail = np.zeros(v.shape[0])
    for k in range(a.shape[1] - 2, -1, -1):
        tail += c.real ** 2 + c.imag ** 2
        c = a[:, k] + rho * c
    return math.exp(-params.gamma * t) * (c.real ** 2 + c.imag ** 2 + s2 * tail)


def time_power_spectrum(t, theta, params: RotorParams):
    """P(t, theta) with unit proportionality constant; zero for t < 0.

    ``theta`` may be a scalar or an array of angles in radians.
    """
    out = _spectrum(float(t), theta, params)
    return float(out[0]) if np.ndim(theta) == 0 else out


def diagonal_spectrum(t, theta, params: RotorParams):
    """Spin-diagonal part of P(t, theta); independent of beta, omega, phi."""
    v = _amplitudes(theta, params.window)
    if t < 0:
        out = np.zeros(v.shape[0])
    else:
        out = math.exp(-params.gamma * t) * np.sum(v * v, axis=1)
    return float(out[0]) if np.ndim(theta) == 0 else out


def spectrum_grid(t_values, theta_grid: AngleGrid, params: RotorParams):
    """Fill P, P_diag and their ratio on a (t, theta) grid."""
    t_values = np.asarray(t_values, dtype=float)
    th = theta_grid.theta_values
    p = np.array([_spectrum(t, th, params) for t in t_values])
    p_diag = np.array([diagonal_spectrum(t, th, params) for t in t_values])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p_diag > 0, p / np.where(p_diag > 0, p_diag, 1.0), np.nan)
    return TimePowerSpectrum(t_values, theta_grid, p, p_diag, ratio)


def fringe_visibility(t, theta_window, params: RotorParams, n_theta=64):
    """Contrast ``(max R - min R) / (max R + min R)`` of ``R = P / P_diag``.

    Angles where P_diag vanishes are skipped.
    """
    lo, hi = theta_window
    if not 0 < lo < hi < math.pi:
        raise DomainError("theta window must be a nonempty subinterval of (0, pi)")
    if n_theta < 16:
        raise DomainError("n_theta must be at least 16")
    th = np.linspace(lo, hi, n_theta)
    p = _spectrum(float(t), th, params)
    pd = diagonal_spectrum(t, th, params)
    ok = pd > 0
    if not np.any(ok):
        raise DomainError("diagonal spectrum vanishes on the whole window")
    r = p[ok] / pd[ok]
    r = np.maximum(r, 0.0)
    hi_r, lo_r = r.max(), r.min()
    if hi_r + lo_r == 0:
        return 0.0
    return float((hi_r - lo_r) / (hi_r + lo_r))


def simpson(y, x):
    """Composite Simpson rule on an odd number of equally spaced points."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 3 or n % 2 == 0:
        raise DomainError("Simpson rule needs an odd number (>= 3) of points")
    h = (x[-1] - x[0]) / (n - 1)
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def angular_integral(t, params: RotorParams, n_theta=8001):
    """Integral of P(t, theta) sin(theta) over [0, pi] by composite Simpson."""
    th = np.linspace(0.0, math.pi, n_theta)
    return simpson(_spectrum(float(t), th, params) * np.sin(th), th)


def sum_rule(t, params: RotorParams):
    """Closed form of :func:`angular_integral`: H(t) e^{-Gamma t} sum_J 2 W(J)/(2J+1)."""
    if t < 0:
        return 0.0
    j = params.window.spins
    return math.exp(-params.gamma * t) * float(np.sum(2.0 * params.window.weights() / (2 * j + 1)))
