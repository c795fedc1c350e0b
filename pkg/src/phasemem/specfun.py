"""Legendre polynomials and the Gaussian spin window.

Angles are in radians; Legendre polynomials are evaluated at ``cos(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

# Edge weight exp(-TRUNCATION**2) ~ 2e-16 of the peak.
TRUNCATION = 6.0


@dataclass(frozen=True)
class AngleGrid:
    theta_values: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta_values, dtype=float)
        if th.ndim != 1 or th.size == 0:
            raise ConfigError("angle grid must be a nonempty 1-d sequence")
        if np.any(np.diff(th) <= 0):
            raise ConfigError("angle grid must be strictly increasing")
        if th[0] < 0 or th[-1] > math.pi:
            raise ConfigError("angles must lie in [0, pi]")
        object.__setattr__(self, "theta_values", th)

    @classmethod
    def from_degrees(cls, start, stop, n):
        return cls(np.radians(np.linspace(start, stop, n)))

    def __len__(self):
        return self.theta_values.size


@dataclass(frozen=True)
class SpinWindow:
    """Gaussian total-spin window ``exp[-(J - center)^2 / width^2]`` on
    the integer range ``[j_min, j_max]``."""

    center: float
    width: float
    j_min: int
    j_max: int

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigError(f"window width must be positive, got {self.width}")
        if self.j_min < 0 or self.j_min > self.j_max:
            raise ConfigError(f"bad spin range [{self.j_min}, {self.j_max}]")

    @classmethod
    def gaussian(cls, center, width):
        """Window truncated at +-6 widths, clipped at J = 0."""
        if not width > 0:
            raise ConfigError(f"window width must be positive, got {width}")
        j_min = max(0, math.floor(center - TRUNCATION * width))
        j_max = max(j_min, math.ceil(center + TRUNCATION * width))
        return cls(float(center), float(width), int(j_min), int(j_max))

    @property
    def spins(self):
        return np.arange(self.j_min, self.j_max + 1)

    def weights(self, center=None):
        """Window weights on ``spins``; ``center`` overrides the stored one."""
        c = self.center if center is None else center
        j = self.spins
        return np.exp(-((j - c) / self.width) ** 2)


def legendre_all(x, j_max):
    """Return ``[P_0(x), ..., P_{j_max}(x)]`` by upward recurrence.

    ``x`` may be a scalar or an array; for array input the result has shape
    ``(j_max + 1,) + x.shape``.
    """
    if j_max < 0:
        raise DomainError(f"j_max must be nonnegative, got {j_max}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise DomainError("Legendre argument must satisfy |x| <= 1")
    out = np.empty((j_max + 1,) + xa.shape)
    out[0] = 1.0
    if j_max >= 1:
        out[1] = xa
    for n in range(1, j_max):
        # (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
        out[n + 1] = ((2 * n + 1) * xa * out[n] - n * out[n - 1]) / (n + 1)
    return out


def gaussian_window(j, window: SpinWindow):
    """Unnormalized weight ``exp[-(j - I)^2 / g^2]``, zero outside the range."""
    if j < window.j_min or j > window.j_max:
        return 0.0
    return math.exp(-(((j - window.center) / window.width) ** 2))
