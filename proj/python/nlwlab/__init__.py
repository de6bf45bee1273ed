"""Radial defocusing wave lab: Python front end over the C++ core."""

import json

from . import _core
from ._core import (
    CoverageError,
    InvalidArgument,
    convergence_order,
    critical_exponent,
    energy_critical_power,
    fit_power_law,
    flux_decay_threshold,
    gamma0_window,
    plateau_check,
    render_report,
    scattering_threshold,
    schema_version,
)

__all__ = [
    "CoverageError",
    "InvalidArgument",
    "config_hash",
    "convergence_order",
    "critical_exponent",
    "diagnose",
    "energy_critical_power",
    "fit_power_law",
    "flux_decay_threshold",
    "gamma0_window",
    "parse_config",
    "plateau_check",
    "render_report",
    "scattering_threshold",
    "schema_version",
    "solve",
]


def parse_config(text):
    return json.loads(_core.parse_config(text))


def config_hash(text):
    return _core.config_hash(text)


def solve(config_text, out_dir):
    """Run the solver; returns the manifest."""
    return json.loads(_core.solve(config_text, str(out_dir)))


def diagnose(run_dir, suite="full"):
    return json.loads(_core.diagnose(str(run_dir), suite))
