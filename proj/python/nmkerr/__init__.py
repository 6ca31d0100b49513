"""Kerr cavities with frequency-dependent loss."""

from ._core import (
    ConfigError,
    KernelModel,
    NumericalError,
    Stability,
    SystemParams,
    classify,
    kk_residual,
    load_model,
    phase_diagram,
    pump_for_n,
    simulate_split_step,
    simulate_two_mode,
    steady_roots,
    sum_rule,
    variance_adiabatic,
    variance_exact,
)

__all__ = [
    "ConfigError",
    "KernelModel",
    "NumericalError",
    "Stability",
    "SystemParams",
    "classify",
    "kk_residual",
    "load_model",
    "phase_diagram",
    "pump_for_n",
    "simulate_split_step",
    "simulate_two_mode",
    "steady_roots",
    "sum_rule",
    "variance_adiabatic",
    "variance_exact",
]
