"""Reported reference values for 24Mg + 28Si scattering and a synthetic
stand-in for the (untabulated) measured autocorrelation."""

from __future__ import annotations

import math

import numpy as np

from .acf_model import CorrelationSeries, ModelParams, PhaseConstant, model_acf

# two parameter sets that fit the measured C(eps) equally well
FIT_SET_D5 = dict(gamma=0.15, beta=0.10, hbar_omega=0.75, d=5.0)
FIT_SET_D1 = dict(gamma=0.15, beta=0.03, hbar_omega=0.75, d=1.0)
I_BAR = 36
SPIN_RANGE = (34, 38)
E_CM_RANGE = (49.0, 57.0)
THETA_CM_RANGE_DEG = (77.0, 98.0)
OBSERVED_PERIOD = 0.75
LORENTZIAN_GAMMA_TEXT = 0.85
LORENTZIAN_GAMMA_CAPTION = 0.085
TOUCHING_SPHERES_HBAR_OMEGA = 1.9


def fit_set(name, phase_constant=PhaseConstant.AS_PRINTED_PI):
    kw = {"d5": FIT_SET_D5, "d1": FIT_SET_D1}[name]
    return ModelParams(**kw, phase_constant=phase_constant)


def finite_range_error(gamma, span):
    """Relative statistical error of an ACF from a record of width ``span``."""
    return math.sqrt(math.pi * gamma / span)


def measured_like_target(seed=0, eps_max=3.0, eps_step=0.05, noise_sd=None,
                      phase_constant=PhaseConstant.AS_PRINTED_PI):
    """Midpoint of the two equivalent fits plus finite-range noise.

    The noise defaults to the finite-range error of an excitation function
    spanning the measured energy interval; C(0) keeps its noise as well.
    """
    n = int(round(eps_max / eps_step))
    eps = eps_step * np.arange(n + 1)
    a = model_acf(eps, fit_set("d5", phase_constant))
    b = model_acf(eps, fit_set("d1", phase_constant))
    if noise_sd is None:
        noise_sd = finite_range_error(FIT_SET_D5["gamma"], E_CM_RANGE[1] - E_CM_RANGE[0])
    rng = np.random.default_rng(seed)
    return CorrelationSeries(eps, 0.5 * (a + b) + noise_sd * rng.standard_normal(eps.size))
