"""Least-squares fits of the analytic ACF, profile scans, Lorentzian comparison.

The amplitude ``A`` in ``target ~ A * C(eps; p)`` is profiled out by weighted
regression through the origin, so the search runs over (Gamma, beta, hw, d)
only: a full grid over the bounds, then Nelder-Mead refinement from the best
grid points. Targets are rescaled to unit peak before fitting and the scale
is restored afterwards, which keeps the search path independent of units.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .acf_model import CorrelationSeries, ModelParams, PhaseConstant, model_acf_arrays
from .errors import ConfigError, DomainError

PARAM_NAMES = ("gamma", "beta", "hbar_omega", "d")
MIN_LAGS = 8
# absolute objective floor; targets are normalized to unit peak
ABS_TOL = 1e-24


@dataclass(frozen=True)
class FitConfig:
    gamma_bounds: tuple = (0.01, 1.0)
    beta_bounds: tuple = (0.0, 1.0)
    hbar_omega_bounds: tuple = (0.1, 2.0)
    d_bounds: tuple = (1.0, 10.0)
    grid_points: int = 12
    n_refine: int = 5
    rel_tol: float = 1e-8
    max_evaluations: int = 10_000
    weight_mode: str = "auto"
    phase_constant: PhaseConstant = PhaseConstant.AS_PRINTED_PI

    def __post_init__(self):
        object.__setattr__(self, "phase_constant", PhaseConstant.parse(self.phase_constant))
        for name, (lo, hi) in zip(PARAM_NAMES, self.bounds):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ConfigError(f"bad bounds for {name}: [{lo}, {hi}]")
        if not self.gamma_bounds[0] > 0:
            raise ConfigError("gamma lower bound must be positive")
        if self.beta_bounds[0] < 0:
            raise ConfigError("beta lower bound must be nonnegative")
        if self.hbar_omega_bounds[0] <= 0:
            raise ConfigError("hbar_omega lower bound must be positive")
        if self.d_bounds[0] < 1:
            raise ConfigError("d lower bound must be >= 1")
        if self.grid_points < 2 or self.n_refine < 1 or self.max_evaluations < 1:
            raise ConfigError("grid_points >= 2, n_refine >= 1, max_evaluations >= 1 required")
        if self.weight_mode not in ("auto", "uniform", "inverse_variance"):
            raise ConfigError(f"unknown weight mode {self.weight_mode!r}")

    @property
    def bounds(self):
        return (self.gamma_bounds, self.beta_bounds, self.hbar_omega_bounds, self.d_bounds)


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    scale: float
    objective: float
    n_evaluations: int
    converged: bool

    def as_dict(self):
        out = self.params.as_dict()
        out.update(scale=self.scale, objective=self.objective,
                   n_evaluations=self.n_evaluations, converged=self.converged)
        return out


@dataclass(frozen=True)
class ProfilePoint:
    beta: float
    objective: float
    gamma: float
    hbar_omega: float
    d: float
    scale: float


@dataclass(frozen=True)
class LorentzianFit:
    gamma: float
    scale: float
    objective: float


class _Problem:
    """Normalized weighted least-squares problem with ``A`` profiled out."""

    def __init__(self, target: CorrelationSeries, weight_mode):
        if len(target) < MIN_LAGS:
            raise DomainError(f"target needs at least {MIN_LAGS} lags, got {len(target)}")
        if target.epsilon_values[0] != 0.0:
            raise DomainError("target must include epsilon = 0")
        y = target.c_values
        self.norm = float(np.max(np.abs(y)))
        if self.norm == 0 or not math.isfinite(self.norm):
            raise DomainError("target is identically zero or not finite")
        self.eps = target.epsilon_values
        self.y = y / self.norm
        se = target.stderr_values
        mode = weight_mode
        if mode == "auto":
            mode = "inverse_variance" if se is not None and np.all(se > 0) else "uniform"
        if mode == "inverse_variance":
            if se is None or np.any(se <= 0):
                raise DomainError("inverse-variance weights need positive standard errors")
            w = 1.0 / se ** 2
        else:
            w = np.ones_like(self.y)
        # objective in target units = unscale * normalized objective
        self.unscale = self.norm ** 2 * float(w.mean())
        self.w = w / w.mean()
        self.mode = mode
        self.n_evaluations = 0

    def profile(self, models):
        """Best ``A >= 0`` and objective for each row of ``models``."""
        m = np.atleast_2d(models)
        num = m @ (self.w * self.y)
        den = (m * m) @ self.w
        a = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        a = np.maximum(a, 0.0)
        r = self.y - a[:, None] * m
        self.n_evaluations += m.shape[0]
        return a, (r * r) @ self.w


def _grid(bounds, n):
    axes = [np.linspace(lo, hi, n) if hi > lo else np.array([lo]) for lo, hi in bounds]
    return np.array(list(itertools.product(*axes)))


def _multistart(evaluate, bounds, config: FitConfig, problem: _Problem):
    """Grid search then Nelder-Mead from the ``n_refine`` best grid points.

    ``evaluate`` maps an (n, k) array of points to model rows (n, n_eps).
    Returns ``(best_point, best_scale, best_objective, converged)``.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    span = np.where(hi > lo, hi - lo, 1.0)
    points = _grid(bounds, config.grid_points)
    objs = np.empty(len(points))
    scales = np.empty(len(points))
    for start in range(0, len(points), 4096):
        chunk = points[start:start + 4096]
        scales[start:start + 4096], objs[start:start + 4096] = problem.profile(evaluate(chunk))
    # ties broken by lexicographic parameter order
    order = np.lexsort(tuple(points[:, k] for k in reversed(range(points.shape[1]))) + (objs,))
    i0 = order[0]
    best = (objs[i0], tuple(points[i0]), points[i0], scales[i0], False)

    def scalar(u):
        x = lo + np.clip(u, 0.0, 1.0) * span
        _, f = problem.profile(evaluate(x[None, :]))
        return float(f[0])

    unit_bounds = [(0.0, 1.0) if h > l else (0.0, 0.0) for l, h in zip(lo, hi)]
    for idx in order[: config.n_refine]:
        u = (points[idx] - lo) / span
        f_prev = objs[idx]
        budget = config.max_evaluations
        ok = False
        # restart from the result until a restart no longer improves
        while budget > 0:
            res = minimize(scalar, u, method="Nelder-Mead", bounds=unit_bounds,
                           options={"xatol": 1e-10, "fatol": config.rel_tol * f_prev + ABS_TOL,
                                    "maxfev": budget})
            budget -= res.nfev
            gain = f_prev - res.fun
            if res.fun < f_prev:
                u, f_prev = res.x, res.fun
            if gain <= config.rel_tol * f_prev + ABS_TOL and res.status == 0:
                ok = True
                break
        x = lo + np.clip(u, 0.0, 1.0) * span
        a, f = problem.profile(evaluate(x[None, :]))
        cand = (float(f[0]), tuple(x), x, float(a[0]), ok)
        if cand[:2] < best[:2]:
            best = cand
    return best[2], best[3], best[0], best[4]


def _eval_full(eps, kc):
    def evaluate(x):
        return model_acf_arrays(eps[None, :], x[:, 0:1], x[:, 1:2], x[:, 2:3], x[:, 3:4], kc)
    return evaluate


def fit_acf(target: CorrelationSeries, config: FitConfig = FitConfig()) -> FitResult:
    """Fit ``A * C(eps; Gamma, beta, hw, d)`` to ``target``; deterministic."""
    problem = _Problem(target, config.weight_mode)
    evaluate = _eval_full(problem.eps, config.phase_constant.value_rad)
    x, a, f, conv = _multistart(evaluate, config.bounds, config, problem)
    params = ModelParams(*map(float, x), phase_constant=config.phase_constant)
    return FitResult(params, a * problem.norm, f * problem.unscale, problem.n_evaluations, conv)


def objective_at(target: CorrelationSeries, params: ModelParams, weight_mode="auto"):
    """Objective (in target units) with ``A`` profiled, at fixed params."""
    problem = _Problem(target, weight_mode)
    m = model_acf_arrays(problem.eps, params.gamma, params.beta, params.hbar_omega,
                         params.d, params.phase_constant.value_rad)
    a, f = problem.profile(m[None, :])
    return float(f[0]) * problem.unscale, float(a[0]) * problem.norm


def degeneracy_scan(target: CorrelationSeries, beta_grid, config: FitConfig = FitConfig()):
    """Profile objective over fixed beta values, re-optimizing Gamma, hw, d, A."""
    betas = [float(b) for b in beta_grid]
    if not betas:
        raise DomainError("beta grid is empty")
    lo, hi = config.beta_bounds
    if any(b < lo or b > hi for b in betas):
        raise DomainError("beta grid leaves the configured bounds")
    kc = config.phase_constant.value_rad
    out = []
    for beta in betas:
        problem = _Problem(target, config.weight_mode)

        def evaluate(x, beta=beta):
            return model_acf_arrays(problem.eps[None, :], x[:, 0:1], beta, x[:, 1:2], x[:, 2:3], kc)

        bounds = (config.gamma_bounds, config.hbar_omega_bounds, config.d_bounds)
        x, a, f, _ = _multistart(evaluate, bounds, config, problem)
        out.append(ProfilePoint(beta, float(f) * problem.unscale, float(x[0]), float(x[1]), float(x[2]),
                                float(a) * problem.norm))
    return out


def profile_spread(profile):
    """Relative variation ``(max - min) / min`` of a profile objective."""
    objs = np.array([p.objective for p in profile])
    lo = objs.min()
    return float((objs.max() - lo) / lo) if lo > 0 else math.inf


def is_degenerate(profile, threshold=0.10):
    """True when the profile varies by less than ``threshold`` of its minimum."""
    return profile_spread(profile) < threshold


def fit_lorentzian(target: CorrelationSeries, config: FitConfig = FitConfig()) -> LorentzianFit:
    """Fit ``A / (1 + (eps/Gamma)^2)`` over the configured Gamma bounds."""
    problem = _Problem(target, config.weight_mode)
    eps = problem.eps

    def evaluate(x):
        return 1.0 / (1.0 + (eps[None, :] / x[:, 0:1]) ** 2)

    x, a, f, _ = _multistart(evaluate, (config.gamma_bounds,), config, problem)
    return LorentzianFit(float(x[0]), float(a) * problem.norm, float(f) * problem.unscale)
