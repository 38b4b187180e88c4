"""Python front end to the radial Yamabe-type solver.

Configs are passed as dicts with the same schema as the CLI's JSON files.
"""

import json

from ._yamabe import contains, f_eval, mu_plus
from ._yamabe import exhaust_json as _exhaust_json
from ._yamabe import solve_json as _solve_json
from ._yamabe import validate_config as _validate_config
from ._yamabe import verify as _verify

__all__ = ["contains", "exhaust", "f_eval", "mu_plus", "solve", "validate", "verify"]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def validate(config):
    """Raise ValueError if the config is malformed or fails a precondition."""
    _validate_config(_text(config))


def solve(config):
    """One Dirichlet solve; returns the summary dict plus 'r' and 'u' lists."""
    return json.loads(_solve_json(_text(config)))


def exhaust(config):
    """Full exhaustion run; returns the report dict."""
    return json.loads(_exhaust_json(_text(config)))


def verify(suite="paper", seed=20240601, inject_fault=""):
    """Run a bundled check suite; returns a list of dicts."""
    return [
        {"suite": s, "name": n, "pass": p, "detail": d}
        for s, n, p, d in _verify(suite, seed, inject_fault)
    ]
