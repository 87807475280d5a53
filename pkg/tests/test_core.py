import math

import pytest

from cavicool.core import (ConfigError, Params, RunControls, Scenario,
                           ScenarioKind, cooperativity, effective_drive,
                           format_manifest, parse_config, validate_pair)


def test_gamma_tot_sums_decays():
    p = Params(gamma=0.85, gamma_prime=0.15)
    assert p.gamma_tot == 1.0


@pytest.mark.parametrize("kwargs, key", [
    (dict(gamma=-1.0), "gamma"),
    (dict(gamma=0.0), "gamma"),
    (dict(gamma=1.0, gamma_prime=-0.1), "gamma_prime"),
    (dict(gamma=1.0, kappa=-1.0), "kappa"),
    (dict(gamma=1.0, g=-1.0), "g"),
    (dict(gamma=1.0, eta=-1.0), "eta"),
    (dict(gamma=1.0, omega_rec=0.0), "omega_rec"),
    (dict(gamma=1.0, n_emitters=0), "n_emitters"),
])
def test_invalid_params_name_the_key(kwargs, key):
    with pytest.raises(ConfigError, match=key):
        Params(**kwargs)


def test_scenario_invariants():
    closed = Scenario(ScenarioKind.CAVITY_CLOSED)
    with pytest.raises(ConfigError, match="gamma_prime"):
        validate_pair(Params(gamma=1.0, gamma_prime=0.1, kappa=10.0), closed)
    with pytest.raises(ConfigError, match="kappa"):
        validate_pair(Params(gamma=1.0), closed)
    with pytest.raises(ConfigError, match="n_emitters"):
        validate_pair(Params(gamma=1.0, kappa=10.0, n_emitters=3), closed)
    validate_pair(Params(gamma=1.0, kappa=10.0, n_emitters=3),
                  Scenario(ScenarioKind.CAVITY_CLOSED_MANY))


def test_effective_drive_cavity_and_free_space():
    p = Params(gamma=1.0, kappa=1000.0, g=155.0, delta_c=200.0, eta=132.0,
               omega=3.0)
    drive = effective_drive(p, ScenarioKind.CAVITY_CLOSED)
    assert drive == -155.0 * 132.0 / (1000.0 + 200.0j)
    assert effective_drive(p, ScenarioKind.FREE_SPACE_CLOSED) == 3.0 + 0.0j


def test_cooperativity_value_and_degenerate_cases():
    p = Params(gamma=1.0, kappa=1000.0, g=155.0)
    assert cooperativity(p) == pytest.approx(24.025, rel=1e-15)
    assert cooperativity(Params(gamma=1.0)) == 0.0
    with pytest.raises(ConfigError, match="kappa"):
        cooperativity(Params(gamma=1.0, g=2.0))


CONFIG = """
[scenario]
kind = "CavityNonClosed"

[params]
gamma = 0.85
gamma_prime = 0.15
kappa = 1000.0
g = 155.0
delta_a = 200.0
delta_c = 200.0
eta = 132.0
omega_rec = 2.5

[initial]
kv0 = 30.0

[integrator]
t_end = 10.0
max_step = 0.0005

[recording]
stride = 7
"""


def test_parse_config_reads_all_sections():
    params, scenario, controls = parse_config(CONFIG)
    assert scenario.kind is ScenarioKind.CAVITY_NONCLOSED
    assert params.g == 155.0 and params.gamma_prime == 0.15
    assert controls.kv0 == 30.0 and controls.stride == 7
    assert controls.max_step == 0.0005


def test_manifest_round_trips_bit_identically():
    params, scenario, controls = parse_config(CONFIG)
    text = format_manifest(params, scenario, controls,
                           artifacts={"run.csv": "ab" * 32})
    params2, scenario2, controls2 = parse_config(text)
    assert params2 == params
    assert scenario2 == scenario
    assert controls2 == controls
    # and the re-emitted manifest is byte-identical
    assert format_manifest(params2, scenario2, controls2,
                           artifacts={"run.csv": "ab" * 32}) == text


@pytest.mark.parametrize("snippet, key", [
    ("[params]\ngamma = 1.0\nbogus = 2\n[scenario]\nkind = \"FreeSpaceClosed\"",
     "params.bogus"),
    ("[scenario]\nkind = \"NoSuchKind\"\n[params]\ngamma = 1.0", "scenario.kind"),
    ("[params]\ngamma = 1.0", "scenario.kind"),
    ("[scenario]\nkind = \"FreeSpaceClosed\"", "params.gamma"),
    ("[scenario]\nkind = \"FreeSpaceClosed\"\n[params]\ngamma = 1.0\n"
     "[initial]\nkv_mean = 1.0", "kv_mean"),
    ("[scenario]\nkind = \"FreeSpaceClosed\"\n[params]\ngamma = 1.0\n"
     "[mystery]\nx = 1", "mystery"),
])
def test_config_errors_name_the_offender(snippet, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(snippet)


def test_config_rejects_non_toml():
    with pytest.raises(ConfigError, match="TOML"):
        parse_config("this is { not toml")


def test_controls_theta0_uniform_accepted():
    c = RunControls(theta0="uniform")
    assert c.theta0 == "uniform"
    with pytest.raises(ConfigError, match="theta0"):
        RunControls(theta0="everywhere")
