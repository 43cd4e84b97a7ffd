"""Python access to the muskat_lab solver core."""

import json

from ._muskat import (
    InvalidArgument,
    NumericalError,
    c_alpha,
    grad_threshold,
    hyp2f1,
    k0,
    mu,
    property_checks,
    pv_exp_integral,
    r_alpha,
    read_snapshot,
    rhs,
    taylor_coeff,
    weighted_series,
)
from ._muskat import default_config as _default_config
from ._muskat import run as _run


def default_config():
    """Default run config as a dict."""
    return json.loads(_default_config())


def run(config, out=None, threads=1):
    """Run a config given as a dict or JSON string."""
    text = config if isinstance(config, str) else json.dumps(config)
    return _run(text, out, threads)


__all__ = [
    "InvalidArgument",
    "NumericalError",
    "c_alpha",
    "default_config",
    "grad_threshold",
    "hyp2f1",
    "k0",
    "mu",
    "property_checks",
    "pv_exp_integral",
    "r_alpha",
    "read_snapshot",
    "rhs",
    "run",
    "taylor_coeff",
    "weighted_series",
]
