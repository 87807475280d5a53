"""Shared domain types, nondimensional conventions and config parsing.

Every rate (decays, detunings, drive amplitudes, recoil frequency) is
expressed in units of a single reference rate: the bare decay rate of the
closed transition, or the total decay rate when a loss channel is present.
Position is carried as the standing-wave phase theta = k*x and velocity as
the Doppler shift w = k*v, so neither the wavenumber nor the mass appears
explicitly; the recoil frequency omega_rec absorbs both.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration input.

    The message always names the offending key path.
    """


class ScenarioKind(enum.Enum):
    FREE_SPACE_CLOSED = "FreeSpaceClosed"
    CAVITY_CLOSED = "CavityClosed"
    FREE_SPACE_NONCLOSED = "FreeSpaceNonClosed"
    CAVITY_NONCLOSED = "CavityNonClosed"
    CAVITY_CLOSED_MANY = "CavityClosedMany"
    CAVITY_NONCLOSED_MANY = "CavityNonClosedMany"

    @property
    def is_cavity(self) -> bool:
        return self not in (ScenarioKind.FREE_SPACE_CLOSED,
                            ScenarioKind.FREE_SPACE_NONCLOSED)

    @property
    def is_closed(self) -> bool:
        return self in (ScenarioKind.FREE_SPACE_CLOSED,
                        ScenarioKind.CAVITY_CLOSED,
                        ScenarioKind.CAVITY_CLOSED_MANY)

    @property
    def is_many(self) -> bool:
        return self in (ScenarioKind.CAVITY_CLOSED_MANY,
                        ScenarioKind.CAVITY_NONCLOSED_MANY)


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind


@dataclass(frozen=True)
class Params:
    """Physical rates and detunings, all in units of the reference rate.

    gamma       decay of the excited state back into the cooling cycle
    gamma_prime decay into the dark intermediate level (0 for closed systems)
    kappa       cavity field decay
    g           peak emitter-cavity coupling at an antinode
    delta_a     emitter-laser detuning (positive = red detuned drive)
    delta_c     cavity-laser detuning
    eta         cavity drive amplitude
    omega       standing-wave Rabi amplitude for free-space drive; inside a
                cavity the effective drive is derived, see effective_drive()
    omega_rec   recoil frequency, converts force to Doppler-shift change
    n_emitters  number of emitters coupled to the mode
    """

    gamma: float
    gamma_prime: float = 0.0
    kappa: float = 0.0
    g: float = 0.0
    delta_a: float = 0.0
    delta_c: float = 0.0
    eta: float = 0.0
    omega: float = 0.0
    omega_rec: float = 1.0
    n_emitters: int = 1

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("params.gamma: must be >= 0")
        if self.gamma_prime < 0:
            raise ConfigError("params.gamma_prime: must be >= 0")
        if self.gamma + self.gamma_prime <= 0:
            raise ConfigError("params.gamma: total decay gamma + gamma_prime must be > 0")
        if self.kappa < 0:
            raise ConfigError("params.kappa: must be >= 0")
        if self.g < 0:
            raise ConfigError("params.g: must be >= 0")
        if self.eta < 0:
            raise ConfigError("params.eta: must be >= 0")
        if self.omega_rec <= 0:
            raise ConfigError("params.omega_rec: must be > 0")
        if self.n_emitters < 1:
            raise ConfigError("params.n_emitters: must be >= 1")

    @property
    def gamma_tot(self) -> float:
        return self.gamma + self.gamma_prime


def validate_pair(params: Params, scenario: Scenario) -> None:
    """Enforce the scenario-dependent invariants on a parameter set.

    Raises ConfigError so no downstream code ever sees an inconsistent
    (Params, Scenario) pair.
    """
    kind = scenario.kind
    if kind.is_closed and params.gamma_prime != 0.0:
        raise ConfigError(
            f"params.gamma_prime: must be 0 for closed scenario {kind.value}")
    if kind.is_cavity and params.kappa <= 0:
        raise ConfigError(
            f"params.kappa: must be > 0 for cavity scenario {kind.value}")
    if not kind.is_many and params.n_emitters != 1:
        raise ConfigError(
            f"params.n_emitters: single-emitter scenario {kind.value} requires n_emitters = 1")


def effective_drive(params: Params, kind: ScenarioKind) -> complex:
    """Drive amplitude seen by the emitter coherence.

    Inside a cavity the empty-cavity field translates the pump eta into the
    effective emitter drive -g*eta/(kappa + i*delta_c).  In free space the
    configured Rabi amplitude is the drive.
    """
    if not kind.is_cavity:
        return complex(params.omega)
    if params.kappa <= 0:
        raise ConfigError("params.kappa: must be > 0 to derive the cavity drive")
    return -params.g * params.eta / (params.kappa + 1j * params.delta_c)


def cooperativity(params: Params) -> float:
    """Single-emitter cooperativity g^2 / (kappa * gamma_tot)."""
    if params.g == 0.0:
        return 0.0
    if params.kappa <= 0:
        raise ConfigError("params.kappa: must be > 0 to form the cooperativity")
    return params.g**2 / (params.kappa * params.gamma_tot)


@dataclass(frozen=True)
class EmitterState:
    """Internal + motional state of a single emitter.

    Populations are carried only for non-closed scenarios; closed dynamics
    linearize the inversion to -1 and never evolve them.
    """

    beta: complex = 0.0
    n_g: float = 1.0
    n_e: float = 0.0
    n_i: float = 0.0
    theta: float = 0.0
    w: float = 0.0


@dataclass(frozen=True)
class SystemState:
    alpha: complex
    emitters: tuple[EmitterState, ...]
    t: float = 0.0

    def __post_init__(self):
        if len(self.emitters) < 1:
            raise ConfigError("state: needs at least one emitter")


@dataclass(frozen=True)
class RunControls:
    """Integrator, initial-condition and recording settings."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_end: float = 100.0
    max_step: float = math.inf
    stride: int = 1
    kv0: float = 0.0
    kv_mean: float | None = None
    kv_std: float | None = None
    theta0: float | str = 0.0
    seed: int = 0
    final_ng_threshold: float = 1e-4
    observables: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ConfigError("integrator.rel_tol/abs_tol: must be > 0")
        if self.t_end <= 0:
            raise ConfigError("integrator.t_end: must be > 0")
        if self.max_step <= 0:
            raise ConfigError("integrator.max_step: must be > 0")
        if self.stride < 1:
            raise ConfigError("recording.stride: must be >= 1")
        if isinstance(self.theta0, str) and self.theta0 != "uniform":
            raise ConfigError('initial.theta0: number or "uniform"')


_PARAM_KEYS = {f.name for f in fields(Params)}
_SCENARIO_KEYS = {"kind"}
_INITIAL_KEYS = {"kv0", "kv_mean", "kv_std", "theta0", "seed"}
_INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "t_end", "max_step", "final_ng_threshold"}
_RECORDING_KEYS = {"stride", "observables"}


def _check_keys(section: str, given: dict, allowed: set[str]) -> None:
    for key in given:
        if key not in allowed:
            raise ConfigError(f"{section}.{key}: unknown key")


def parse_config(source: str) -> tuple[Params, Scenario, RunControls]:
    """Parse a TOML config document into validated run inputs.

    Accepts either a raw config or a previously emitted manifest (the
    manifest is a strict echo of the resolved configuration, so the
    round-trip reproduces bit-identical parameters).
    """
    try:
        doc = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config: not valid TOML ({exc})") from exc

    known_sections = {"params", "scenario", "initial", "integrator",
                      "recording", "artifacts"}
    for section in doc:
        if section not in known_sections:
            raise ConfigError(f"{section}: unknown section")

    sc = doc.get("scenario", {})
    _check_keys("scenario", sc, _SCENARIO_KEYS)
    if "kind" not in sc:
        raise ConfigError("scenario.kind: missing required key")
    try:
        kind = ScenarioKind(sc["kind"])
    except ValueError:
        names = ", ".join(k.value for k in ScenarioKind)
        raise ConfigError(f"scenario.kind: {sc['kind']!r} not one of {names}") from None
    scenario = Scenario(kind)

    pr = doc.get("params", {})
    _check_keys("params", pr, _PARAM_KEYS)
    if "gamma" not in pr:
        raise ConfigError("params.gamma: missing required key")
    numeric = {}
    for key, value in pr.items():
        if key == "n_emitters":
            if not isinstance(value, int):
                raise ConfigError("params.n_emitters: must be an integer")
            numeric[key] = value
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"params.{key}: must be a number")
            numeric[key] = float(value)
    params = Params(**numeric)
    validate_pair(params, scenario)

    init = doc.get("initial", {})
    _check_keys("initial", init, _INITIAL_KEYS)
    integ = doc.get("integrator", {})
    _check_keys("integrator", integ, _INTEGRATOR_KEYS)
    rec = doc.get("recording", {})
    _check_keys("recording", rec, _RECORDING_KEYS)

    ctrl_kwargs: dict = {}
    for key in ("rel_tol", "abs_tol", "t_end", "max_step", "final_ng_threshold"):
        if key in integ:
            ctrl_kwargs[key] = float(integ[key])
    if "stride" in rec:
        if not isinstance(rec["stride"], int):
            raise ConfigError("recording.stride: must be an integer")
        ctrl_kwargs["stride"] = rec["stride"]
    if "observables" in rec:
        obs = rec["observables"]
        if not isinstance(obs, list) or not all(isinstance(o, str) for o in obs):
            raise ConfigError("recording.observables: must be a list of strings")
        ctrl_kwargs["observables"] = tuple(obs)
    if "kv0" in init:
        ctrl_kwargs["kv0"] = float(init["kv0"])
    if "kv_mean" in init:
        ctrl_kwargs["kv_mean"] = float(init["kv_mean"])
    if "kv_std" in init:
        ctrl_kwargs["kv_std"] = float(init["kv_std"])
    if "seed" in init:
        if not isinstance(init["seed"], int):
            raise ConfigError("initial.seed: must be an integer")
        ctrl_kwargs["seed"] = init["seed"]
    if "theta0" in init:
        theta0 = init["theta0"]
        if isinstance(theta0, str):
            ctrl_kwargs["theta0"] = theta0
        else:
            ctrl_kwargs["theta0"] = float(theta0)
    if ("kv_mean" in ctrl_kwargs) != ("kv_std" in ctrl_kwargs):
        raise ConfigError("initial.kv_mean/kv_std: must be given together")
    controls = RunControls(**ctrl_kwargs)
    return params, scenario, controls


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # repr is the shortest round-tripping decimal form
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def format_manifest(params: Params, scenario: Scenario, controls: RunControls,
                    artifacts: dict[str, str] | None = None) -> str:
    """Echo every resolved value as a TOML manifest.

    Feeding the manifest back through parse_config reproduces bit-identical
    parameters.  `artifacts` maps output filenames to their sha256 hex
    digests.
    """
    lines = ["[scenario]", f'kind = "{scenario.kind.value}"', "", "[params]"]
    for f in fields(Params):
        lines.append(f"{f.name} = {_toml_value(getattr(params, f.name))}")
    lines += ["", "[initial]", f"kv0 = {_toml_value(controls.kv0)}"]
    if controls.kv_mean is not None:
        lines.append(f"kv_mean = {_toml_value(controls.kv_mean)}")
        lines.append(f"kv_std = {_toml_value(controls.kv_std)}")
    lines.append(f"theta0 = {_toml_value(controls.theta0)}")
    lines.append(f"seed = {controls.seed}")
    lines += [
        "",
        "[integrator]",
        f"rel_tol = {_toml_value(controls.rel_tol)}",
        f"abs_tol = {_toml_value(controls.abs_tol)}",
        f"t_end = {_toml_value(controls.t_end)}",
        f"final_ng_threshold = {_toml_value(controls.final_ng_threshold)}",
    ]
    if math.isfinite(controls.max_step):
        lines.append(f"max_step = {_toml_value(controls.max_step)}")
    lines += ["", "[recording]", f"stride = {controls.stride}"]
    if controls.observables:
        lines.append(f"observables = {_toml_value(list(controls.observables))}")
    if artifacts:
        lines += ["", "[artifacts]"]
        for name in sorted(artifacts):
            lines.append(f'"{name}" = "{artifacts[name]}"')
    return "\n".join(lines) + "\n"
