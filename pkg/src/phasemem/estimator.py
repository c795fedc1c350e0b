"""Sample energy autocorrelation of excitation functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .acf_model import CorrelationSeries
from .errors import ConfigError, DomainError

MIN_POINTS = 16


@dataclass(frozen=True)
class ExcitationFunction:
    energies: np.ndarray
    sigma: np.ndarray
    channel_label: str = ""

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        s = np.asarray(self.sigma, dtype=float)
        if e.ndim != 1 or e.shape != s.shape:
            raise ConfigError("energies and sigma must be equal-length 1-d arrays")
        if e.size < MIN_POINTS:
            raise ConfigError(f"need at least {MIN_POINTS} points, got {e.size}")
        steps = np.diff(e)
        if np.any(steps <= 0):
            raise ConfigError("energies must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > 1e-6 * abs(steps.mean()) + 1e-12 * np.max(np.abs(e)):
            raise ConfigError("energies must be uniformly spaced")
        if np.any(s < 0):
            raise ConfigError("cross sections must be nonnegative")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "sigma", s)

    @property
    def step(self):
        return (self.energies[-1] - self.energies[0]) / (self.energies.size - 1)

    @property
    def span(self):
        return self.energies[-1] - self.energies[0]

    def with_sigma(self, sigma):
        return replace(self, sigma=np.asarray(sigma, dtype=float))


def detrend(xf: ExcitationFunction, method="moving_average", *, window_mev=None,
            order=None, expected_gamma=None):
    """Split ``xf.sigma`` into ``(fluctuation, trend)``, fluctuation = sigma - trend.

    ``moving_average`` uses a centered boxcar of ``window_mev`` that shrinks
    symmetrically near the edges, so linear trends pass through unchanged.
    ``poly`` fits a least-squares polynomial of ``order`` <= 3.
    """
    s = xf.sigma
    n = s.size
    if method == "moving_average":
        if window_mev is None or not window_mev > 0:
            raise DomainError("moving_average needs a positive window_mev")
        if window_mev > xf.span / 3.0:
            raise DomainError(f"window {window_mev} MeV exceeds a third of the {xf.span:g} MeV span")
        if expected_gamma is not None and window_mev < 5.0 * expected_gamma:
            raise DomainError("window must be at least 5x the expected width")
        half = int(round(0.5 * window_mev / xf.step))
        if half < 1:
            raise DomainError("window shorter than two grid steps")
        csum = np.concatenate(([0.0], np.cumsum(s)))
        idx = np.arange(n)
        h = np.minimum(half, np.minimum(idx, n - 1 - idx))
        trend = (csum[idx + h + 1] - csum[idx - h]) / (2 * h + 1)
    elif method == "poly":
        if order is None or not 0 <= order <= 3:
            raise DomainError("poly detrending needs 0 <= order <= 3")
        if n < order + 2:
            raise DomainError("insufficient data for the polynomial order")
        x = (xf.energies - xf.energies.mean()) / (0.5 * xf.span)
        coef = np.polynomial.polynomial.polyfit(x, s, order)
        trend = np.polynomial.polynomial.polyval(x, coef)
    else:
        raise ConfigError(f"unknown detrending method {method!r}")
    return s - trend, trend


def relative_fluctuation(xf: ExcitationFunction, trend):
    """``sigma / trend``; the form fed to :func:`sample_acf` after detrending."""
    trend = np.asarray(trend, dtype=float)
    if np.any(trend <= 0):
        raise DomainError("trend must be positive to form relative fluctuations")
    return xf.with_sigma(xf.sigma / trend)


def sample_acf(xf: ExcitationFunction, eps_max, *, max_fraction=0.25):
    """``C(eps_l) = <s(E+eps) s(E)> / (<s(E+eps)> <s(E)>) - 1``.

    Every average is the arithmetic mean over the grid points admissible at
    lag ``l`` (the overlap of the shifted and unshifted series).
    """
    if eps_max < 0:
        raise DomainError("eps_max must be nonnegative")
    if eps_max > max_fraction * xf.span * (1 + 1e-9):
        raise DomainError(f"eps_max {eps_max} exceeds {max_fraction} of the data span")
    s = xf.sigma
    n = s.size
    if s.mean() == 0:
        raise DomainError("mean cross section is zero")
    n_lag = int(math.floor(eps_max / xf.step + 1e-9))
    c = np.empty(n_lag + 1)
    for lag in range(n_lag + 1):
        a = s[lag:]
        b = s[: n - lag]
        ma, mb = a.mean(), b.mean()
        if ma == 0 or mb == 0:
            raise DomainError("mean cross section vanishes on a lag overlap")
        c[lag] = np.mean(a * b) / (ma * mb) - 1.0
    return CorrelationSeries(xf.step * np.arange(n_lag + 1), c)


def average_channels(series_list):
    """Pointwise mean over channels with the across-channel standard error."""
    if not series_list:
        raise DomainError("no correlation series to average")
    eps = series_list[0].epsilon_values
    for s in series_list[1:]:
        if s.epsilon_values.shape != eps.shape or not np.allclose(s.epsilon_values, eps, rtol=1e-9, atol=1e-12):
            raise DomainError("correlation series do not share an epsilon grid")
    stack = np.array([s.c_values for s in series_list])
    mean = stack.mean(axis=0)
    if len(series_list) > 1:
        se = stack.std(axis=0, ddof=1) / math.sqrt(len(series_list))
    else:
        se = np.zeros_like(mean)
    return CorrelationSeries(eps, mean, se)
