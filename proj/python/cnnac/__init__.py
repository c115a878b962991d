"""Convolutional-network adaptive controller: network, Jacobian, simulation."""

from ._cnnac import (
    ConfigError,
    DivergenceError,
    NetworkSpec,
    RunResult,
    Scenario,
    cnn_operator,
    emit_scenario,
    forward,
    gradcheck,
    jacobian,
    load_scenario,
    parse_scenario,
    preset,
    preset_names,
    reference_rmse,
    simulate,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "NetworkSpec",
    "RunResult",
    "Scenario",
    "cnn_operator",
    "emit_scenario",
    "forward",
    "gradcheck",
    "jacobian",
    "load_scenario",
    "parse_scenario",
    "preset",
    "preset_names",
    "reference_rmse",
    "simulate",
]
