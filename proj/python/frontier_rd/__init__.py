"""Multi-threshold fuzzy regression discontinuity over census-town rules.

Thin wrappers over the C++ core. Results come back as plain dicts.
"""

import csv
import io
import json

import numpy as np

from . import _core
from ._core import FrontierError, frontier_distance, normalize, run_cli

__version__ = _core.__version__

__all__ = [
    "FrontierError",
    "binned_scatter",
    "frontier_distance",
    "generate",
    "mccrary",
    "normalize",
    "ols",
    "replicate",
    "run_cli",
    "tsls",
]


def _config_text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return "".join(f"{k} = {str(v).lower() if isinstance(v, bool) else v}\n" for k, v in config.items())


def _matrix(x, n):
    if x is None:
        return np.zeros((n, 0))
    x = np.asarray(x, dtype=float)
    return x.reshape(n, -1) if x.ndim == 1 else x


def _codes(groups):
    if groups is None:
        return None
    _, inverse = np.unique(np.asarray(groups), return_inverse=True)
    return inverse.astype(np.int64).tolist()


def ols(y, x=None, *, cluster, fe=None, names=None):
    """Clustered OLS of y on the columns of x, absorbing fe (intercept without)."""
    y = np.asarray(y, dtype=float)
    x = _matrix(x, len(y))
    return json.loads(_core._ols(y, x, list(names or []), _codes(cluster), _codes(fe)))


def tsls(y, d, z, x=None, *, cluster, fe=None, names=None):
    """Just-identified 2SLS of y on d instrumented by z. Adds the partial R2."""
    y = np.asarray(y, dtype=float)
    x = _matrix(x, len(y))
    fit, pr2 = _core._tsls(y, np.asarray(d, dtype=float), np.asarray(z, dtype=float), x,
                           list(names or []), _codes(cluster), _codes(fe))
    out = json.loads(fit)
    out["partial_r2"] = pr2
    return out


def mccrary(running, cutoff=0.0, *, jackknife=False):
    return json.loads(_core._mccrary(np.asarray(running, dtype=float).tolist(), float(cutoff), jackknife))


def binned_scatter(x, y, n_bins=20, fit_degree=-1):
    text = _core._binned_scatter(np.asarray(x, dtype=float).tolist(),
                                 np.asarray(y, dtype=float).tolist(), int(n_bins), int(fit_degree))
    return list(csv.DictReader(io.StringIO(text)))


def generate(config=None):
    """Synthetic settlement panel as a list of CSV rows (dicts of strings)."""
    return list(csv.DictReader(io.StringIO(_core._generate_csv(_config_text(config)))))


def replicate(config=None, reps=100, *, estimator="tsls", outcome="y", threads=1, records=False):
    return json.loads(_core._replicate(_config_text(config), int(reps), estimator, outcome,
                                       int(threads), records))
