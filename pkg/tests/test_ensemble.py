import math

import numpy as np
import pytest
from scipy import stats

from conftest import FLAGSHIP_THETA, flagship_config
from phasemem.acf_model import ModelParams
from phasemem.ensemble import (EnsembleConfig, cauchy_phase_path, ensemble_acf, fourier_matrix, mean_excitation,
                               open_unit_uniform, run_ensemble, smatrix_from_paths, stream_rng,
                               synth_excitation, synth_smatrix, time_weights)
from phasemem.errors import ConfigError, DomainError
from phasemem.specfun import SpinWindow


def small_config(**kw):
    base = dict(params=ModelParams(0.15, 0.03, 0.75, 1.0), window=SpinWindow.gaussian(36, 1.0),
                e_min=49.0, e_max=51.0, e_step=0.05)
    base.update(kw)
    return EnsembleConfig(**base)


def test_zero_beta_path_is_flat():
    t = np.linspace(0, 80, 4096)
    assert np.array_equal(cauchy_phase_path(t, 0.0, stream_rng(0, 0, 1)), np.zeros(t.size))
    with pytest.raises(DomainError):
        cauchy_phase_path(t, -0.1, stream_rng(0, 0, 1))


def test_open_uniforms():
    u = open_unit_uniform(stream_rng(5, 0, 1), 100000)
    assert u.min() > 0 and u.max() < 1


def test_cauchy_increment_quartiles():
    t = np.arange(100001) * 0.02
    beta = 0.1
    inc = np.diff(cauchy_phase_path(t, beta, stream_rng(11, 0, 1))) / (beta * 0.02)
    q1, q3 = np.quantile(inc, [0.25, 0.75])
    assert q1 == pytest.approx(-1.0, rel=0.02)
    assert q3 == pytest.approx(1.0, rel=0.02)


def test_cauchy_stability():
    # sums of m increments of scale beta*dt are Cauchy with scale beta*m*dt
    dt, beta, m = 0.01, 0.2, 50
    t = np.arange(200 * m * 20 + 1) * dt
    path = cauchy_phase_path(t, beta, stream_rng(2, 3, 1))
    blocks = np.diff(path[::m]) / (beta * m * dt)
    assert stats.kstest(blocks, "cauchy").pvalue > 0.01


def test_streams_differ_and_repeat():
    a = stream_rng(7, 3, 0).standard_normal(8)
    assert np.array_equal(a, stream_rng(7, 3, 0).standard_normal(8))
    assert not np.array_equal(a, stream_rng(7, 3, 1).standard_normal(8))
    assert not np.array_equal(a, stream_rng(7, 4, 0).standard_normal(8))


def test_smatrix_moments():
    cfg = small_config(n_realizations=400, base_seed=9)
    vals = np.array([synth_smatrix(cfg, i)[6, 20] for i in range(cfg.n_realizations)])
    n = vals.size
    assert abs(vals.real.mean()) < 3 * vals.real.std(ddof=1) / math.sqrt(n)
    assert abs(vals.imag.mean()) < 3 * vals.imag.std(ddof=1) / math.sqrt(n)
    p = np.abs(vals) ** 2
    assert abs(p.mean() - 1.0) < 3 * p.std(ddof=1) / math.sqrt(n)


def test_single_spin_cross_section():
    cfg = small_config(window=SpinWindow.gaussian(36, 1e-3), sigma_d=2.5)
    assert list(cfg.spins) == [35, 36, 37]
    assert np.array_equal(cfg.window_weights()[[0, 2]], np.zeros((2, 41)))
    s = synth_smatrix(cfg, 0)
    xf = synth_excitation(s, cfg, 1.1)
    assert np.all(xf.sigma >= 2.5)
    np.testing.assert_allclose(xf.sigma - 2.5, 2 * 73 ** 2 * np.abs(s[1]) ** 2, rtol=1e-12)


def test_shared_noise_is_coherent_across_spins():
    t = np.arange(1024) * 0.05
    e = np.linspace(49, 51, 41)
    noise = np.exp(1j * np.arange(1024.0))
    s = smatrix_from_paths(fourier_matrix(e, t), t, time_weights(1024, 0.05), noise,
                           np.zeros(1024), np.arange(30.0, 43.0), 0.15, 0.0)
    for row in s[1:]:
        assert np.array_equal(row, s[0])


def test_mean_cross_section_matches_closed_form(flagship):
    cfg, res, _ = flagship
    per_real = np.array([x.sigma.mean() for x in res.excitations])
    expected = mean_excitation(cfg).mean()
    se = per_real.std(ddof=1) / math.sqrt(per_real.size)
    assert abs(per_real.mean() - expected) < 3 * se


def test_fast_phase_relaxation_kills_oscillations():
    cfg = EnsembleConfig(ModelParams(0.15, 7.5, 0.75, 1.0), SpinWindow.gaussian(36, 1.0), 49.0, 57.0, 0.025,
                         n_realizations=100, base_seed=3)
    c = ensemble_acf(cfg, FLAGSHIP_THETA, 2.0)
    v, eps = c.c_values, c.epsilon_values
    after = np.flatnonzero(v <= 0)
    start = after[0] if after.size else np.searchsorted(eps, 5 * 0.15, side="right")
    assert np.max(np.abs(v[start:])) < 0.05 * v[0]


def test_thread_count_does_not_change_results():
    cfg = small_config(n_realizations=12, base_seed=4)
    a = run_ensemble(cfg, FLAGSHIP_THETA, 0.4, kernel_delta_j=(0, 1), threads=1)
    b = run_ensemble(cfg, FLAGSHIP_THETA, 0.4, kernel_delta_j=(0, 1), threads=3)
    assert np.array_equal(a.acf, b.acf)
    assert np.array_equal(a.kernel, b.kernel)


def test_standard_error_scaling():
    se = []
    for n in (50, 200):
        cfg = small_config(n_realizations=n, base_seed=21)
        se.append(run_ensemble(cfg, FLAGSHIP_THETA, 0.4).acf_series().stderr_values.mean())
    assert se[0] / se[1] == pytest.approx(2.0, rel=0.2)


def test_config_validation():
    with pytest.raises(ConfigError):
        small_config(t_max=5.0)
    with pytest.raises(ConfigError):
        small_config(n_samples=1000)
    with pytest.raises(ConfigError):
        small_config(e_min=52.0)
    cfg = small_config()
    assert cfg.t_max == pytest.approx(80.0)
    assert cfg.dt <= min(0.1 / 0.15, math.pi / (10 * 0.75 * 12)) + 1e-15


def test_kernel_spins_out_of_window():
    with pytest.raises(DomainError):
        run_ensemble(small_config(n_realizations=2), 1.0, 0.2, kernel_delta_j=(0, 9))


def test_flagship_shapes(flagship):
    cfg, res, _ = flagship
    assert res.acf.shape == (400, 81)
    assert res.kernel.shape == (400, 5, 81)
    assert flagship_config().spins[0] == 30
