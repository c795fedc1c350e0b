"""Monte Carlo S-matrix ensemble with spin off-diagonal correlations.

Each realization drives every partial wave with one shared complex white
noise ``c(t)`` on a time grid, damped by ``exp(-Gamma t / 2)`` and rotated by
``exp[-i J (omega t + theta_rot(t))]``, where ``theta_rot`` is a Cauchy random
walk of scale ``beta`` per unit time. Averaging ``exp(-i dJ theta_rot(t))``
over the walk gives ``exp(-beta |dJ| t)``, so the ensemble correlation of the
energy-domain elements is ``Gamma / (Gamma + beta|dJ| + i hw dJ - i eps)``.

Times are in hbar/MeV and energies in MeV.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .acf_model import CorrelationSeries, ModelParams
from .errors import ConfigError, DomainError
from .estimator import ExcitationFunction, sample_acf
from .kinematics import WindowKinematics
from .specfun import TRUNCATION, SpinWindow

NOISE_STREAM = 0
PHASE_STREAM = 1
MIN_SAMPLES = 1024
MIN_DECAY_WIDTHS = 10.0


def stream_rng(base_seed, realization_index, stream_role):
    """Counter-based Philox generator keyed by (seed, realization, role)."""
    ss = np.random.SeedSequence(entropy=int(base_seed),
                                spawn_key=(int(realization_index), int(stream_role)))
    return np.random.Generator(np.random.Philox(ss))


def open_unit_uniform(rng, size):
    """Uniforms on the open interval (0, 1) of the form (k + 1/2) / 2^53."""
    k = rng.integers(0, 2 ** 53, size=size, dtype=np.int64)
    return (k.astype(float) + 0.5) * 2.0 ** -53


def cauchy_phase_path(t_grid, beta, rng):
    """Cauchy random walk: theta(t_0) = 0, increments of scale beta * dt."""
    t = np.asarray(t_grid, dtype=float)
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    path = np.zeros(t.size)
    if t.size < 2 or beta == 0:
        return path
    u = open_unit_uniform(rng, t.size - 1)
    steps = beta * np.diff(t) * np.tan(math.pi * (u - 0.5))
    path[1:] = np.cumsum(steps)
    return path


def default_thread_count():
    env = os.environ.get("PHASEMEM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"PHASEMEM_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EnsembleConfig:
    params: ModelParams
    window: SpinWindow
    e_min: float
    e_max: float
    e_step: float
    phi: float = 0.0
    sigma_d: float = 0.0
    n_realizations: int = 400
    base_seed: int = 0
    t_max: Optional[float] = None
    n_samples: Optional[int] = None
    kinematics: Optional[WindowKinematics] = None
    spins: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.e_max > self.e_min:
            raise ConfigError("e_max must exceed e_min")
        if not self.e_step > 0:
            raise ConfigError("energy step must be positive")
        if self.sigma_d < 0:
            raise ConfigError("sigma_d must be nonnegative")
        if self.n_realizations < 1:
            raise ConfigError("n_realizations must be positive")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ConfigError("base_seed must be a 64-bit unsigned integer")
        gamma = self.params.gamma
        t_max = 12.0 / gamma if self.t_max is None else float(self.t_max)
        if t_max < MIN_DECAY_WIDTHS / gamma * (1 - 1e-12):
            raise ConfigError(f"t_max = {t_max} is below 10 hbar/Gamma = {MIN_DECAY_WIDTHS / gamma}")
        object.__setattr__(self, "t_max", t_max)
        spins = self._spin_range()
        object.__setattr__(self, "spins", spins)
        if self.n_samples is None:
            span_j = max(1, int(spins[-1] - spins[0]))
            dt_bound = min(0.1 / gamma, math.pi / (10.0 * self.params.hbar_omega * span_j))
            n = MIN_SAMPLES
            while t_max / n > dt_bound:
                n *= 2
            object.__setattr__(self, "n_samples", n)
        n = int(self.n_samples)
        if n < MIN_SAMPLES or n & (n - 1):
            raise ConfigError("n_samples must be a power of two >= 1024")

    def _spin_range(self):
        if self.kinematics is None:
            return self.window.spins
        e = self.energies
        centers = self.kinematics.center(e)
        g = self.window.width
        lo = max(0, math.floor(centers.min() - TRUNCATION * g))
        hi = max(lo, math.ceil(centers.max() + TRUNCATION * g))
        return np.arange(lo, hi + 1)

    @property
    def energies(self):
        n = int(math.floor((self.e_max - self.e_min) / self.e_step + 1e-9))
        return self.e_min + self.e_step * np.arange(n + 1)

    @property
    def dt(self):
        return self.t_max / self.n_samples

    @property
    def times(self):
        return self.dt * np.arange(self.n_samples)

    def window_weights(self):
        """W(J; I(E_k), g) with shape (n_J, n_E)."""
        j = self.spins[:, None].astype(float)
        if self.kinematics is None:
            c = np.full((1, self.energies.size), self.window.center)
        else:
            c = self.kinematics.center(self.energies)[None, :]
        return np.exp(-((j - c) / self.window.width) ** 2)


def time_weights(n_samples, dt):
    """Amplitude quadrature weights; the half-weight at t = 0 gives the
    trapezoid rule for the second moments."""
    w = np.full(n_samples, dt)
    w[0] = dt / math.sqrt(2.0)
    return w


def fourier_matrix(energies, times):
    return np.exp(1j * np.outer(energies, times))


def smatrix_from_paths(fourier, times, weights, noise, phase_path, spins, gamma, hbar_omega):
    """Direct-sum transform of one realization's time-domain drive.

    Returns the complex matrix dS[J, E_k] with shape (n_J, n_E).
    """
    rot = hbar_omega * times + phase_path
    drive = weights * np.exp(-0.5 * gamma * times) * noise
    rows = drive[None, :] * np.exp(-1j * np.outer(spins, rot))
    # spins as rows of the left operand: every spin gets the same reduction
    # order, so equal drives give bitwise equal rows
    return math.sqrt(gamma) * (rows @ fourier.T)


def white_noise(rng, n_samples, dt):
    """Complex Gaussian samples of variance 1/dt."""
    z = rng.standard_normal((n_samples, 2))
    return (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0 * dt)


class _Workspace:
    """Per-run cached arrays shared read-only by all realizations."""

    def __init__(self, config: EnsembleConfig):
        self.config = config
        self.times = config.times
        self.weights = time_weights(config.n_samples, config.dt)
        self.fourier = fourier_matrix(config.energies, self.times)

    def smatrix(self, index):
        c = self.config
        noise = white_noise(stream_rng(c.base_seed, index, NOISE_STREAM), c.n_samples, c.dt)
        path = cauchy_phase_path(self.times, c.params.beta,
                                 stream_rng(c.base_seed, index, PHASE_STREAM))
        return smatrix_from_paths(self.fourier, self.times, self.weights, noise, path,
                                  c.spins.astype(float), c.params.gamma, c.params.hbar_omega)


def synth_smatrix(config: EnsembleConfig, realization_index, _workspace=None):
    """One realization of dS^J(E_k), shape (n_J, n_E) over ``config.spins``."""
    ws = _workspace or _Workspace(config)
    return ws.smatrix(realization_index)


def synth_excitation(smatrix, config: EnsembleConfig, theta, label=""):
    """Angle-resolved excitation function sigma_d + |df+|^2 + |df-|^2."""
    j = config.spins.astype(float)
    amp = (2 * j + 1)[:, None] * np.sqrt(config.window_weights())
    fp = np.sum(amp * np.exp(1j * j * (config.phi + theta))[:, None] * smatrix, axis=0)
    fm = np.sum(amp * np.exp(1j * j * (config.phi - theta))[:, None] * smatrix, axis=0)
    sigma = config.sigma_d + np.abs(fp) ** 2 + np.abs(fm) ** 2
    return ExcitationFunction(config.energies, sigma, label)


def mean_excitation(config: EnsembleConfig):
    """Ensemble mean of sigma: sigma_d + 2 sum_J (2J+1)^2 W(J), per energy."""
    j = config.spins.astype(float)[:, None]
    return config.sigma_d + 2.0 * np.sum((2 * j + 1) ** 2 * config.window_weights(), axis=0)


def lagged_products(smatrix, j_index, delta_js, n_lag):
    """Energy-averaged <dS^{J+dJ}(E+eps) dS^J(E)*> for lags 0..n_lag-1.

    Returns complex array (len(delta_js), n_lag).
    """
    ref = smatrix[j_index]
    n = ref.size
    out = np.empty((len(delta_js), n_lag), dtype=complex)
    for a, dj in enumerate(delta_js):
        other = smatrix[j_index + dj]
        for lag in range(n_lag):
            out[a, lag] = np.mean(other[lag:] * np.conj(ref[: n - lag]))
    return out


@dataclass
class EnsembleResult:
    """Per-realization statistics stacked along axis 0 in realization order."""

    epsilon: np.ndarray
    acf: np.ndarray
    kernel: Optional[np.ndarray] = None
    kernel_delta_j: tuple = ()
    excitations: list = field(default_factory=list)

    def acf_series(self):
        return _mean_series(self.epsilon, self.acf)

    def kernel_stats(self):
        """Mean and standard error of real and imaginary kernel parts."""
        k = self.kernel
        n = k.shape[0]
        mean = k.mean(axis=0)
        se_re = k.real.std(axis=0, ddof=1) / math.sqrt(n)
        se_im = k.imag.std(axis=0, ddof=1) / math.sqrt(n)
        return mean, se_re, se_im


def _mean_series(eps, stack):
    n = stack.shape[0]
    mean = stack.mean(axis=0)
    se = stack.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    return CorrelationSeries(eps, mean, se)


def run_ensemble(config: EnsembleConfig, theta, eps_max=None, *, kernel_delta_j=(),
                 kernel_j=None, keep_excitations=False, threads=None):
    """Simulate every realization and collect ACF (and optionally kernel) data.

    Realizations are independent and may run on several threads; results are
    stored by realization index, so the output does not depend on scheduling.
    """
    ws = _Workspace(config)
    energies = config.energies
    span = energies[-1] - energies[0]
    if eps_max is None:
        eps_max = 0.25 * span
    n_lag = int(math.floor(eps_max / config.e_step + 1e-9)) + 1
    if kernel_delta_j:
        j_ref = int(round(config.window.center)) if kernel_j is None else int(kernel_j)
        j_index = j_ref - int(config.spins[0])
        if j_index < 0 or j_index + max(kernel_delta_j) >= config.spins.size or j_index + min(kernel_delta_j) < 0:
            raise DomainError("kernel spins fall outside the simulated window")

    def one(index):
        s = ws.smatrix(index)
        xf = synth_excitation(s, config, theta, label=f"realization_{index}")
        acf = sample_acf(xf, eps_max).c_values
        ker = lagged_products(s, j_index, kernel_delta_j, n_lag) if kernel_delta_j else None
        return acf, ker, (xf if keep_excitations else None)

    n_threads = default_thread_count() if threads is None else max(1, int(threads))
    indices = range(config.n_realizations)
    if n_threads == 1:
        results = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(one, indices))
    acf = np.array([r[0] for r in results])
    ker = np.array([r[1] for r in results]) if kernel_delta_j else None
    xfs = [r[2] for r in results] if keep_excitations else []
    eps = config.e_step * np.arange(acf.shape[1])
    return EnsembleResult(eps, acf, ker, tuple(kernel_delta_j), xfs)


def ensemble_acf(config: EnsembleConfig, theta, eps_max=None, threads=None):
    """Across-realization mean of the sample ACF with its standard error."""
    if config.n_realizations < 2:
        raise DomainError("ensemble ACF needs at least two realizations")
    return run_ensemble(config, theta, eps_max, threads=threads).acf_series()
