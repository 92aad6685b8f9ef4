"""Python access to the eclab core."""

import json

from ._eclab import (
    Cone,
    DimensionError,
    EclabError,
    HypothesisViolated,
    InvalidInputError,
    ParseError,
    TestFunction,
    TubeViolation,
    UsageError,
    check_coefficient_condition,
    check_transform,
    chronological_floor,
    chronological_order,
    coefficient_D_K,
    default_config,
    example1_integral,
    exponential_closed_form,
    iota,
    lambda_constant,
    pairing_oracle,
    scenario_names,
    wightman_eval,
)
from ._eclab import _run_scenario

__all__ = [
    "Cone",
    "DimensionError",
    "EclabError",
    "HypothesisViolated",
    "InvalidInputError",
    "ParseError",
    "TestFunction",
    "TubeViolation",
    "UsageError",
    "check_coefficient_condition",
    "check_transform",
    "chronological_floor",
    "chronological_order",
    "coefficient_D_K",
    "default_config",
    "example1_integral",
    "exponential_closed_form",
    "iota",
    "lambda_constant",
    "pairing_oracle",
    "run_scenario",
    "scenario_names",
    "wightman_eval",
]


def run_scenario(name, **overrides):
    """Run a registered scenario; keyword overrides use "section.key" names
    with the dot written as a double underscore, e.g. params__n=3."""
    flat = {k.replace("__", "."): str(v) for k, v in overrides.items()}
    return json.loads(_run_scenario(name, flat))
