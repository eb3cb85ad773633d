"""Attractor reachability probabilities of asynchronous logical models."""

import json

from ._core import (
    CapacityError,
    Model,
    ModelError,
    NumericalError,
    generate_model,
    is_multistable,
    load_model,
    parse_model,
)
from . import _core

__all__ = [
    "CapacityError",
    "Model",
    "ModelError",
    "NumericalError",
    "analyze",
    "generate_model",
    "is_multistable",
    "load_model",
    "parse_model",
]


def analyze(model, method="exact", **options):
    """Run one engine ("exact", "firefront" or "avatar") and return the report as a dict."""
    if isinstance(model, str):
        model = load_model(model)
    runners = {
        "exact": _core.exact_json,
        "firefront": _core.firefront_json,
        "avatar": _core.avatar_json,
    }
    if method not in runners:
        raise ValueError(f"unknown method {method!r}")
    return json.loads(runners[method](model, **options))
