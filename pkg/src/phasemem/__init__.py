"""Slow phase-relaxation correlation model of complex collisions."""

__version__ = "0.1.0"

from .acf_model import (CorrelationSeries, ModelParams, PhaseConstant, lorentzian_acf,
                        model_acf, peak_spacing, smatrix_kernel)
from .ensemble import EnsembleConfig, ensemble_acf, run_ensemble, synth_excitation, synth_smatrix
from .estimator import ExcitationFunction, average_channels, detrend, sample_acf
from .fit import FitConfig, FitResult, degeneracy_scan, fit_acf, fit_lorentzian
from .kinematics import RotorGeometry, WindowKinematics, rotor_frequency, spin_window_params
from .specfun import AngleGrid, SpinWindow, gaussian_window, legendre_all
from .tps import (RotorParams, diagonal_spectrum, fringe_visibility, spectrum_grid,
                  time_power_spectrum)

__all__ = [
    "AngleGrid", "CorrelationSeries", "EnsembleConfig", "ExcitationFunction", "FitConfig",
    "FitResult", "ModelParams", "PhaseConstant", "RotorGeometry", "RotorParams", "SpinWindow",
    "WindowKinematics", "average_channels", "degeneracy_scan", "detrend", "diagonal_spectrum",
    "ensemble_acf", "fit_acf", "fit_lorentzian", "fringe_visibility", "gaussian_window",
    "legendre_all", "lorentzian_acf", "model_acf", "peak_spacing", "rotor_frequency",
    "run_ensemble", "sample_acf", "smatrix_kernel", "spectrum_grid", "spin_window_params",
    "synth_excitation", "synth_smatrix", "time_power_spectrum",
]
