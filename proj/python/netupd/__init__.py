"""Synthesis of ordering updates for software-defined networks."""

import json as _json
import pkgutil as _pkgutil

# Lets an in-tree build directory supply the compiled module.
__path__ = _pkgutil.extend_path(__path__, __name__)

from . import _core  # noqa: E402
from ._core import (  # noqa: E402,F401
    FormatError,
    KripkeError,
    LoopError,
    LtlError,
    NetworkError,
    SimError,
    TopologyError,
)

__all__ = [
    "example",
    "diamond",
    "fattree",
    "smallworld",
    "parse_gml",
    "order_update",
    "model_check",
    "remove_waits",
    "verify",
    "simulate",
    "normalize_formula",
]


def _text(x):
    return x if isinstance(x, str) else _json.dumps(x)


def _prop(p):
    if isinstance(p, str):
        return p
    return _json.dumps(p)


def example(waypoint=False):
    """Two-pod worked example as a scenario dict (red to green, or red to blue)."""
    return _json.loads(_core.example(waypoint))


def diamond(n, k=4, p=0.1, kind="reachability", pairs=1, double_diamond=False, seed=0):
    return _json.loads(_core.diamond(n, k, p, kind, pairs, double_diamond, seed))


def fattree(k):
    return _json.loads(_core.fattree(k))


def smallworld(n, k=4, p=0.1, seed=0):
    return _json.loads(_core.smallworld(n, k, p, seed))


def parse_gml(text):
    return _json.loads(_core.parse_gml(text))


def order_update(initial, final, prop, granularity="switch", prune=True, early_term=True,
                 incremental=True, timeout=0.0):
    out = _core.order_update(_text(initial), _text(final), _prop(prop), granularity, prune,
                             early_term, incremental, timeout)
    return _json.loads(out)


def model_check(network, prop):
    return _json.loads(_core.model_check(_text(network), _prop(prop)))


def remove_waits(initial, commands, prop):
    return _json.loads(_core.remove_waits(_text(initial), _text(commands), _prop(prop)))


def verify(initial, commands, prop):
    return _json.loads(_core.verify(_text(initial), _text(commands), _prop(prop)))


def simulate(network, commands, seed=0, inject=16):
    return _json.loads(_core.simulate(_text(network), _text(commands), seed, inject))


def normalize_formula(text):
    return _core.normalize_formula(text)
