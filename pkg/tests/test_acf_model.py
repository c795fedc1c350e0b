import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasemem.acf_model import (CorrelationSeries, ModelParams, lorentzian_acf, model_acf,
                                oscillating_factor, peak_spacing, smatrix_kernel)
from phasemem.errors import ConfigError, DomainError

# arbitrary-precision evaluation (mpmath, 50 digits) of the closed form
FROZEN_C_AT_1P5_PI = 0.24253087520722540
FROZEN_C_AT_1P5_TWO_PI = 0.13049883103853850

params_st = st.builds(
    lambda g, bf, hw, d: ModelParams(g, bf * g, hw, d),
    st.floats(0.01, 1.0), st.floats(0.0, 1.0), st.floats(0.1, 2.0), st.floats(1.0, 10.0),
)


def test_params_validation():
    with pytest.raises(ConfigError):
        ModelParams(0.0, 0.1, 0.75, 5)
    with pytest.raises(ConfigError):
        ModelParams(0.15, -0.1, 0.75, 5)
    with pytest.raises(ConfigError):
        ModelParams(0.15, 0.1, 0.75, 0.5)
    with pytest.raises(ConfigError):
        ModelParams(0.15, 0.1, 0.75, 5, phase_constant="three_pi")


def test_kernel_examples():
    p = ModelParams(0.15, 0.1, 0.75, 5)
    assert smatrix_kernel(0, 0.0, p) == 1 + 0j
    assert smatrix_kernel(0, 0.15, p) == pytest.approx(0.5 + 0.5j, abs=1e-15)
    assert smatrix_kernel(1, 0.0, p) == pytest.approx(0.06 - 0.18j, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(params_st, st.integers(-20, 20), st.floats(-5, 5))
def test_kernel_hermitian_and_bounded(p, dj, eps):
    k = smatrix_kernel(dj, eps, p)
    assert smatrix_kernel(-dj, -eps, p) == k.conjugate()
    assert abs(k) <= 1.0
    if dj != 0 or eps != 0:
        if p.beta * abs(dj) + abs(p.hbar_omega * dj - eps) > 1e-9:
            assert abs(k) < 1.0


def test_model_at_zero_is_one():
    assert model_acf(0.0, ModelParams(0.15, 0.1, 0.75, 5)) == 1.0


def test_large_gamma_closed_form():
    p = ModelParams(75.0, 0.0, 0.75, 5)
    assert model_acf(0.75, p) == pytest.approx(-math.exp(-1 / 50), abs=1e-12)


def test_frozen_arbitrary_precision_values():
    p = ModelParams(0.15, 0.1, 0.75, 5)
    assert model_acf(1.5, p) == pytest.approx(FROZEN_C_AT_1P5_PI, abs=1e-10)
    assert model_acf(1.5, p.with_(phase_constant="two_pi")) == pytest.approx(FROZEN_C_AT_1P5_TWO_PI, abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(params_st, st.floats(0, 10))
def test_normalization_and_evenness(p, eps):
    assert abs(model_acf(0.0, p) - 1) < 1e-10
    assert model_acf(-eps, p) == model_acf(eps, p)


def test_array_and_scalar_agree():
    p = ModelParams(0.15, 0.03, 0.75, 1, "two_pi")
    eps = np.linspace(0, 3, 31)
    np.testing.assert_array_equal(model_acf(eps, p), [model_acf(e, p) for e in eps])


def test_closed_form_beta_zero():
    # envelope-free factor (cos u - r) / (1 - 2 r cos u + r^2), normalized at u = 0
    p = ModelParams(0.15, 0.0, 0.75, 1)
    eps = np.linspace(0, 4, 41)
    r = math.exp(-math.pi * 0.15 / 0.75)
    u = math.pi * eps / 0.75
    f = (np.cos(u) - r) / (1 - 2 * r * np.cos(u) + r * r)
    np.testing.assert_allclose(oscillating_factor(eps, p), f / f[0], atol=1e-12)


def test_beta_zero_periodicity_as_printed():
    p = ModelParams(0.15, 0.0, 0.75, 3)
    eps = np.linspace(0, 3, 61)
    np.testing.assert_allclose(oscillating_factor(eps + 2 * 0.75, p), oscillating_factor(eps, p), atol=1e-10)
    q = p.with_(phase_constant="two_pi")
    np.testing.assert_allclose(oscillating_factor(eps + 0.75, q), oscillating_factor(eps, q), atol=1e-10)


def test_damping_of_maxima():
    p = ModelParams(0.15, 0.05, 0.75, 5)
    step = 0.001
    eps = step * np.arange(int(12 / step) + 1)
    f = oscillating_factor(eps, p)
    k = np.where((f[1:-1] > f[:-2]) & (f[1:-1] >= f[2:]))[0] + 1
    assert len(k) >= 3
    assert np.all(np.diff(f[k]) < 0)


def test_lorentzian():
    assert lorentzian_acf(0.0, 0.3) == 1.0
    assert lorentzian_acf(0.3, 0.3) == 0.5
    assert lorentzian_acf(0.17, 0.085) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(DomainError):
        lorentzian_acf(0.1, 0.0)


def test_peak_spacing_both_phase_constants():
    p = ModelParams(0.15, 0.0, 0.75, 5)
    step = 0.005
    assert peak_spacing(p, 6.0, step) == pytest.approx(1.5, abs=step)
    assert peak_spacing(p.with_(phase_constant="two_pi"), 6.0, step) == pytest.approx(0.75, abs=step)


def test_peak_spacing_none_for_monotone_decay():
    p = ModelParams(0.15, 7.5, 0.75, 5)
    assert peak_spacing(p, 6.0, 0.005) is None
    # too short a scan to see two maxima
    assert peak_spacing(ModelParams(0.15, 0.0, 0.75, 5), 2.0, 0.005) is None


def test_peak_spacing_errors():
    p = ModelParams(0.15, 0.0, 0.75, 5)
    with pytest.raises(DomainError):
        peak_spacing(p, 0.0, 0.005)
    with pytest.raises(DomainError):
        peak_spacing(p, 3.0, 0.1)


def test_correlation_series_invariants():
    s = CorrelationSeries([0, 0.1, 0.2], [2.0, 1.0, 0.5], [0.2, 0.1, 0.1])
    n = s.normalized()
    np.testing.assert_allclose(n.c_values, [1, 0.5, 0.25])
    np.testing.assert_allclose(n.stderr_values, [0.1, 0.05, 0.05])
    with pytest.raises(ConfigError):
        CorrelationSeries([0.1, 0.2], [1, 1])
    with pytest.raises(ConfigError):
        CorrelationSeries([0, 0.2, 0.1], [1, 1, 1])
    with pytest.raises(ConfigError):
        CorrelationSeries([0, 0.1], [1, 1], [-1, 0])
