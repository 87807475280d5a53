"""Doppler cooling of quantum emitters in free space and lossy cavities.

Mean-field trajectory integration, steady-state sideband expansions,
closed-form cooling and population-loss rates, and reproducible dataset
generation (CSV + manifest).
"""

from .analytics import (ExponentIntegral, RatePrediction,
                        final_velocity_exponent_integral, final_velocity_fs,
                        final_velocity_ratio_cavity, mu_free_space,
                        predict_rates, v_of_t_nonclosed_cavity_regime_i,
                        v_of_t_nonclosed_fs, xi_cavity_many, xi_cavity_single,
                        xi_free_space)
from .core import (ConfigError, EmitterState, Params, RunControls, Scenario,
                   ScenarioKind, SystemState, cooperativity, effective_drive,
                   format_manifest, parse_config, validate_pair)
from .dynamics import (FitError, IntegrationError, RateReport, Trajectory,
                       default_max_step, fit_cooling_rate, initial_state,
                       integrate, operational_final_velocity, solve_ng_ode)
from .experiments import (FIGURES, RunSpec, SweepSpec, run_figure, run_sweep,
                          run_validate, small_doppler_window, write_csv)
from .floquet import (FloquetSolution, cavity_amplitude_adiabatic,
                      floquet_cavity_2x2, floquet_cavity_infinite,
                      floquet_free_space, floquet_many_sherman_morrison,
                      toeplitz_lambda)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "EmitterState", "ExponentIntegral", "FIGURES", "FitError",
    "FloquetSolution", "IntegrationError", "Params", "RatePrediction",
    "RateReport", "RunControls", "RunSpec", "Scenario", "ScenarioKind",
    "SweepSpec", "SystemState", "Trajectory", "cavity_amplitude_adiabatic",
    "cooperativity", "default_max_step", "effective_drive",
    "final_velocity_exponent_integral", "final_velocity_fs",
    "final_velocity_ratio_cavity", "fit_cooling_rate", "floquet_cavity_2x2",
    "floquet_cavity_infinite", "floquet_free_space",
    "floquet_many_sherman_morrison", "format_manifest", "initial_state",
    "integrate", "mu_free_space", "operational_final_velocity", "parse_config",
    "predict_rates", "run_figure", "run_sweep", "run_validate",
    "small_doppler_window", "solve_ng_ode", "toeplitz_lambda", "validate_pair",
    "v_of_t_nonclosed_cavity_regime_i", "v_of_t_nonclosed_fs", "write_csv",
    "xi_cavity_many", "xi_cavity_single", "xi_free_space",
]
