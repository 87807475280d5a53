import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavicool import floquet
from cavicool.core import Params

LAM_REF = -0.32758366871498912 + 0.2252940415953564j  # gamma=1, da=3, g=20, kappa=40
B0_RATIO_REF = 0.99552146860574575  # |b0_cav|/|b0_fs| at the strong-Purcell set


def cavity_params(**over):
    base = dict(gamma=1.0, delta_a=3.0, delta_c=3.0, g=20.0, kappa=40.0,
                eta=5.0)
    base.update(over)
    return Params(**base)


def test_free_space_zero_doppler_pair():
    p = Params(gamma=1.0, delta_a=10.0, omega=1.0)
    sol = floquet.floquet_free_space(p, 0.0)
    expected = -1j / (2.0 * (1.0 + 10.0j))
    assert sol.b_plus == pytest.approx(expected)
    assert sol.b_minus == sol.b_plus == sol.b0


def test_free_space_expansion_error_is_second_order():
    p = Params(gamma=1.0, delta_a=10.0, omega=1.0)
    errors = []
    for kv in (1.0, 0.5, 0.25):
        sol = floquet.floquet_free_space(p, kv)
        approx = sol.b0 + kv * sol.b1
        errors.append(abs(sol.b_plus - approx))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.15)
    assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.15)


@given(kv=st.floats(min_value=-30.0, max_value=30.0, allow_subnormal=False))
@settings(max_examples=50, deadline=None)
def test_free_space_velocity_parity(kv):
    p = Params(gamma=1.0, delta_a=10.0, omega=1.0)
    a = floquet.floquet_free_space(p, kv)
    b = floquet.floquet_free_space(p, -kv)
    assert a.b_plus == b.b_minus
    assert a.b_minus == b.b_plus


def test_cavity_2x2_solves_its_truncated_system():
    p = cavity_params()
    for kv in (0.0, 0.7, -4.0):
        sol = floquet.floquet_cavity_2x2(p, kv)
        assert floquet.residual_cavity_2x2(p, kv, sol) < 1e-14


def test_cavity_2x2_regular_at_zero_doppler():
    sol = floquet.floquet_cavity_2x2(cavity_params(), 0.0)
    assert sol.b_plus == sol.b_minus


def test_cavity_2x2_requires_resonant_cavity():
    with pytest.raises(ValueError, match="delta_c == delta_a"):
        floquet.floquet_cavity_2x2(cavity_params(delta_c=2.0), 0.0)


def test_cavity_suppresses_zero_velocity_coherence():
    p = Params(gamma=1.0, kappa=1000.0, g=155.0, delta_a=200.0,
               delta_c=200.0, eta=132.0)
    cav = floquet.floquet_cavity_2x2(p, 0.0)
    fs = floquet.floquet_free_space(p, 0.0,
                                    omega=abs(-p.g * p.eta / (p.kappa + 1j * p.delta_c)))
    assert abs(cav.b0) / abs(fs.b0) == pytest.approx(B0_RATIO_REF, rel=1e-12)


def test_toeplitz_root_reference_value():
    lam = floquet.toeplitz_lambda(cavity_params())
    assert lam == pytest.approx(LAM_REF, rel=1e-14)
    assert floquet.lambda_residual(cavity_params()) < 1e-13


@given(gamma=st.floats(min_value=0.05, max_value=5.0),
       delta_a=st.floats(min_value=-50.0, max_value=50.0),
       g=st.floats(min_value=0.1, max_value=50.0),
       kappa=st.floats(min_value=0.5, max_value=2000.0))
@settings(max_examples=200, deadline=None)
def test_toeplitz_root_inside_unit_disk(gamma, delta_a, g, kappa):
    p = Params(gamma=gamma, delta_a=delta_a, g=g, kappa=kappa)
    lam = floquet.toeplitz_lambda(p)
    assert abs(lam) < 1.0
    assert floquet.lambda_residual(p) < 1e-13


def test_toeplitz_root_degenerate_on_unit_circle():
    with pytest.raises(ValueError, match="degenerate"):
        floquet.toeplitz_lambda(Params(gamma=1e-300, delta_a=0.0, g=1.0,
                                       kappa=1.0))


def test_truncation_order_matches_dense_solve():
    p = cavity_params()
    order = floquet.default_truncation_order(p)
    lam = floquet.toeplitz_lambda(p)
    assert abs(lam) ** ((order + 1) // 2) < 1e-12
    sol = floquet.floquet_cavity_infinite(p, order)
    harm, dense = floquet.dense_cavity_solve(p, 0.0, order + 40)
    ladder = (sol.b0,) + sol.higher
    for n, value in enumerate(ladder):
        ref = dense[harm == 2 * n + 1][0]
        assert abs(value - ref) <= 1e-10 * abs(ladder[0])


def test_infinite_order_linear_response_matches_dense_derivative():
    p = cavity_params()
    sol = floquet.floquet_cavity_infinite(p)
    order = floquet.default_truncation_order(p) + 40
    h = 1e-7
    harm, bp = floquet.dense_cavity_solve(p, h, order)
    _, bm = floquet.dense_cavity_solve(p, -h, order)
    fd = (bp[harm == 1][0] - bm[harm == 1][0]) / (2.0 * h)
    assert abs(fd - sol.b1) <= 1e-6 * abs(sol.b1)


def test_infinite_order_rejects_even_truncation():
    with pytest.raises(ValueError, match="odd"):
        floquet.floquet_cavity_infinite(cavity_params(), order=4)


@pytest.mark.parametrize("n", [1, 2, 8, 64])
def test_ensemble_closed_form_matches_dense_solve(n):
    rng = np.random.default_rng(n)
    p = Params(gamma=1.0, delta_a=5.0, delta_c=5.0, g=2.0, kappa=100.0,
               eta=3.0, n_emitters=n)
    kv = rng.normal(0.0, 1.0, size=n)
    sols = floquet.floquet_many_sherman_morrison(p, kv)
    bm, bp = floquet.dense_many_solve(p, kv)
    scale = max(abs(b) for b in bp)
    for sol, m, q in zip(sols, bm, bp):
        assert abs(sol.b_minus - m) <= 1e-10 * scale
        assert abs(sol.b_plus - q) <= 1e-10 * scale
    assert floquet.residual_many(p, kv, sols) < 1e-10


def test_ensemble_single_emitter_matches_2x2():
    p = Params(gamma=1.0, delta_a=5.0, delta_c=5.0, g=2.0, kappa=100.0,
               eta=3.0)
    kv = 0.37
    ens = floquet.floquet_many_sherman_morrison(p, [kv])[0]
    pair = floquet.floquet_cavity_2x2(p, kv)
    assert ens.b_plus == pytest.approx(pair.b_plus, rel=1e-12)
    assert ens.b_minus == pytest.approx(pair.b_minus, rel=1e-12)
    assert ens.b0 == pytest.approx(pair.b0, rel=1e-12)
    assert ens.b1 == pytest.approx(pair.b1, rel=1e-12)


def test_2x2_free_space_limit_as_g_vanishes():
    p = Params(gamma=1.3, gamma_prime=0.2, delta_a=7.0, delta_c=7.0,
               g=1e-30, kappa=50.0)
    cav = floquet.floquet_cavity_2x2(p, 0.4, omega=1.0)
    fs = floquet.floquet_free_space(p, 0.4, omega=1.0)
    assert abs(cav.b_plus - fs.b_plus) <= 1e-12 * abs(fs.b_plus)
    assert abs(cav.b_minus - fs.b_minus) <= 1e-12 * abs(fs.b_minus)


def test_perturbative_consistency_of_linear_response():
    p = cavity_params()
    errors = []
    for kv in (0.2, 0.1, 0.05):
        sol = floquet.floquet_cavity_2x2(p, kv)
        fd = (sol.b_plus - sol.b_minus) / (2.0 * kv)
        errors.append(abs(fd - sol.b1))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)


def test_cavity_amplitude_includes_emitter_backaction():
    p = cavity_params()
    sol = floquet.floquet_cavity_2x2(p, 0.0)
    amp = floquet.cavity_amplitude_adiabatic(p, [sol])
    empty = -p.eta / (p.kappa + 1j * p.delta_c)
    assert amp != empty
    assert amp == pytest.approx(empty - 1j * p.g / p.kappa * sol.b0)
