import math

import numpy as np
import pytest

from phasemem.errors import DomainError
from phasemem.specfun import AngleGrid, SpinWindow
from phasemem.tps import (_amplitudes, _coherence_matrix, RotorParams, angular_integral, diagonal_spectrum, fringe_visibility,
                          simpson, spectrum_grid, sum_rule, time_power_spectrum)

THETA = np.radians(np.linspace(1, 179, 89))


def rotor(beta=0.03, g=1.0, phi=0.0, hw=0.75, center=36):
    return RotorParams(0.15, beta, hw, phi, SpinWindow.gaussian(center, g))


def test_heaviside():
    p = rotor()
    assert time_power_spectrum(-1.0, 0.4, p) == 0.0
    assert diagonal_spectrum(-1.0, 0.4, p) == 0.0
    assert np.all(time_power_spectrum(-0.1, THETA, p) == 0)


def test_single_spin_window():
    p = RotorParams(0.15, 0.1, 0.75, 0.3, SpinWindow.gaussian(36, 1e-3))
    x = np.cos(THETA)
    from phasemem.specfun import legendre_all
    p36 = legendre_all(x, 36)[-1]
    for t in (0.0, 2.0, 7.5):
        expected = math.exp(-0.15 * t) * p36 ** 2
        np.testing.assert_allclose(time_power_spectrum(t, THETA, p), expected, rtol=1e-12, atol=1e-300)
        np.testing.assert_allclose(diagonal_spectrum(t, THETA, p), time_power_spectrum(t, THETA, p), rtol=1e-12)


def test_full_revolution_without_damping():
    p = rotor(beta=0.0, g=2.0)
    T = p.period
    np.testing.assert_allclose(time_power_spectrum(T, THETA, p),
                               math.exp(-0.15 * T) * time_power_spectrum(0.0, THETA, p),
                               rtol=1e-9, atol=1e-12)


def test_diagonal_independent_of_beta_omega_phi():
    ref = diagonal_spectrum(3.0, THETA, rotor(beta=0.0))
    for beta in (0.03, 0.1):
        assert np.array_equal(diagonal_spectrum(3.0, THETA, rotor(beta=beta)), ref)
    assert np.array_equal(diagonal_spectrum(3.0, THETA, rotor(phi=1.1, hw=1.3)), ref)


def test_nonnegative_on_grid():
    for beta in (0.0, 0.03, 0.1):
        p = rotor(beta=beta, g=5.0)
        grid = AngleGrid.from_degrees(0, 180, 361)
        spec = spectrum_grid(np.linspace(0, 2 * p.period, 17), grid, p)
        assert np.all(spec.p >= 0)
        np.testing.assert_allclose(spec.ratio * spec.p_diag, spec.p, rtol=1e-12)


@pytest.mark.parametrize("beta,g,phi,hw", [(0.0, 1.0, 0.0, 0.75), (0.1, 5.0, 0.4, 0.75), (0.03, 2.5, 2.0, 1.9)])
def test_angular_sum_rule(beta, g, phi, hw):
    p = rotor(beta=beta, g=g, phi=phi, hw=hw)
    for t in np.linspace(0, 2 * p.period, 5):
        assert angular_integral(t, p) == pytest.approx(sum_rule(t, p), rel=1e-9)


def test_diagonal_limit():
    p = rotor(beta=0.1, g=5.0)
    t = 50 / 0.1
    th = np.radians(np.linspace(10, 170, 161))
    r = time_power_spectrum(t, th, p) / diagonal_spectrum(t, th, p)
    assert np.max(np.abs(r - 1)) < 1e-3


def test_parity_for_even_single_spin():
    p = RotorParams(0.15, 0.05, 0.75, 0.0, SpinWindow.gaussian(36, 1e-3))
    np.testing.assert_allclose(time_power_spectrum(2.0, math.pi - THETA, p),
                               time_power_spectrum(2.0, THETA, p), rtol=1e-12)


def test_reflection_shifts_deflection_by_pi():
    # P_J(-x) = (-1)^J P_J(x) turns theta -> pi - theta into phi -> phi + pi
    a = time_power_spectrum(1.3, math.pi - THETA, rotor(g=3.0, phi=0.0))
    b = time_power_spectrum(1.3, THETA, rotor(g=3.0, phi=math.pi))
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12 * np.max(np.abs(a)))


def test_visibility_limits():
    # no off-diagonal terms: ratio is identically one
    flat = RotorParams(0.15, 0.05, 0.75, 0.0, SpinWindow.gaussian(36, 1e-3))
    assert fringe_visibility(1.0, (math.radians(80), math.radians(100)), flat) == pytest.approx(0, abs=1e-12)
    # beta = 0 at t = 0: two coherent spins give R = (v1 + v2)^2 / (v1^2 + v2^2), zero where v1 = -v2
    two = RotorParams(0.15, 0.0, 0.75, 0.0, SpinWindow(0.5, 10.0, 0, 1))
    assert fringe_visibility(0.0, (math.radians(100), math.radians(175)), two, 2001) == pytest.approx(1.0, abs=1e-3)


def test_visibility_errors():
    p = rotor()
    with pytest.raises(DomainError):
        fringe_visibility(1.0, (0.0, 1.0), p)
    with pytest.raises(DomainError):
        fringe_visibility(1.0, (1.0, 1.2), p, n_theta=8)


def test_fringe_contrast_ordering():
    a = rotor(beta=0.03, g=1.0)
    b = rotor(beta=0.1, g=5.0)
    t = a.period / 4
    w = (math.radians(80), math.radians(100))
    assert fringe_visibility(t, w, a) > fringe_visibility(t, w, b)


def test_simpson_exact_for_cubics():
    x = np.linspace(0, 2, 11)
    assert simpson(x ** 3 - x, x) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(DomainError):
        simpson(x[:-1], x[:-1])


@pytest.mark.parametrize("beta,t", [(0.0, 3.0), (0.03, 5.0), (0.1, 40.0), (0.1, 0.0)])
def test_matches_dense_quadratic_form(beta, t):
    p = rotor(beta=beta, g=5.0, phi=0.4)
    v = _amplitudes(THETA, p.window)
    dense = math.exp(-0.15 * t) * np.einsum("aj,jk,ak->a", v, _coherence_matrix(t, p), v).real
    got = time_power_spectrum(t, THETA, p)
    assert np.max(np.abs(got - dense)) < 1e-12 * np.max(np.abs(dense))
