"""Python interface to the islab C++ core."""

import json

from ._islab import (
    IslandMap,
    anosov_sigma,
    cone_certificate,
    max_lyapunov,
    rescaling_error,
    run_suite_json,
    symplectic_defect,
    validate_config,
)


def run_suite(text, out, seed=None, threads=None):
    """Run a suite from config text and return the report as a dict."""
    return json.loads(run_suite_json(text, out, seed, threads))


__all__ = [
    "IslandMap",
    "anosov_sigma",
    "cone_certificate",
    "max_lyapunov",
    "rescaling_error",
    "run_suite",
    "symplectic_defect",
    "validate_config",
]
