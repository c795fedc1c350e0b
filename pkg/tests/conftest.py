import math
import time

import pytest

from phasemem.acf_model import ModelParams
from phasemem.ensemble import EnsembleConfig, run_ensemble
from phasemem.specfun import SpinWindow

FLAGSHIP_THETA = math.radians(87.5)


def flagship_config(n_realizations=400, base_seed=1, **kw):
    params = ModelParams(0.15, 0.03, 0.75, 1.0)
    return EnsembleConfig(params, SpinWindow.gaussian(36, 1.0), 49.0, 57.0, 0.025,
                          n_realizations=n_realizations, base_seed=base_seed, **kw)


@pytest.fixture(scope="session")
def flagship():
    """The reference ensemble: 400 realizations with kernel lags for dJ = 0..4.

    Returns ``(config, result, wall_seconds)``.
    """
    cfg = flagship_config()
    start = time.perf_counter()
    res = run_ensemble(cfg, FLAGSHIP_THETA, 2.0, kernel_delta_j=(0, 1, 2, 3, 4), keep_excitations=True)
    return cfg, res, time.perf_counter() - start
