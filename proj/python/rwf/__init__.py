"""Random wavelet features for non-stationary Gaussian process regression."""

import json as _json

import numpy as _np

from ._rwf import (
    ArgumentError,
    BlrPosterior,
    ConfigError,
    DataError,
    FeatureMap,
    NumericalError,
    UnsupportedError,
    blr_fit,
    blr_log_marginal,
    eval_mother,
    gen_multistep,
    rbf_kernel,
    sample_complexity,
    wavelet_kernel,
)
from . import _rwf

__all__ = [
    "ArgumentError", "BlrPosterior", "ConfigError", "DataError", "FeatureMap", "Model",
    "NumericalError", "UnsupportedError", "benchmark", "blr_fit", "blr_log_marginal",
    "eval_mother", "gen_multistep", "rbf_kernel", "sample_complexity", "verify", "wavelet_kernel",
]


def _dump(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else _json.dumps(config)


def verify(config=None, only=(), negative_controls=False):
    """Runs the theory checks; returns a list of report dicts."""
    return _json.loads(_rwf.verify(_dump(config), list(only), negative_controls))


def benchmark(config=None):
    """Runs the benchmark; returns {"rows": [...], "aggregate": [...]}."""
    return _json.loads(_rwf.benchmark(_dump(config)))


class Model:
    """A fitted rwf, rff or exact GP regressor in raw data units."""

    def __init__(self, impl):
        self._impl = impl

    @classmethod
    def fit(cls, x, y, method="rwf", config=None):
        x = _np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return cls(_rwf.Model.fit(x, _np.asarray(y, dtype=float), method, _dump(config)))

    @classmethod
    def load(cls, path):
        return cls(_rwf.Model.load(str(path)))

    def save(self, path):
        self._impl.save(str(path))

    def predict(self, x, workers=1):
        """Predictive mean and variance (including noise)."""
        x = _np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return self._impl.predict(x, workers)

    @property
    def method(self):
        return self._impl.method

    @property
    def log_marginal(self):
        return self._impl.log_marginal

    @property
    def hyperparameters(self):
        return _json.loads(self._impl.hyperparameters)
