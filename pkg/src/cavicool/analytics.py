"""Closed-form cooling and population-loss rates, velocity time courses
and final-velocity predictions.

All expressions use |Omega|^2 for the drive strength and gamma_tot for the
emitter linewidth, so the closed-system formulas are the gamma_prime = 0
special case of the non-closed ones.  Negative detuning is accepted and
yields a negative (heating) rate rather than an error, so sweeps may pass
through resonance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import Params, ScenarioKind, cooperativity, effective_drive


@dataclass(frozen=True)
class RatePrediction:
    """Analytic rate summary for one parameter set.

    xi is the velocity damping (friction) rate, mu the population-loss rate
    (zero for closed systems).  The flags mark whether the small-Doppler
    expansion (kv << delta_a) and the two-sideband truncation
    (gamma_tot*C/(4*delta_a) << 1) are trustworthy.
    """

    xi: float
    mu: float
    small_doppler_ok: bool
    regime_i_ok: bool


def regime_i_ok(params: Params) -> bool:
    """True when the two-sideband truncation is valid."""
    if params.delta_a == 0:
        return False
    c = cooperativity(params)
    return params.gamma_tot * c / (4.0 * abs(params.delta_a)) < 1.0


def _omega_sq(params: Params, omega, cavity: bool | None = None) -> float:
    if omega is None:
        # default to the matched drive: the cavity-derived amplitude
        # whenever the parameters describe a cavity
        if cavity is None:
            cavity = params.g > 0 and params.kappa > 0
        kind = ScenarioKind.CAVITY_CLOSED if cavity else ScenarioKind.FREE_SPACE_CLOSED
        omega = effective_drive(params, kind)
    return abs(omega) ** 2


def xi_free_space(params: Params, omega: complex | None = None) -> float:
    """Free-space Doppler friction rate at the matched drive strength.

    Odd in delta_a: red detuning cools, blue detuning heats.
    """
    osq = _omega_sq(params, omega)
    gt = params.gamma_tot
    da = params.delta_a
    return 4.0 * osq * params.omega_rec * da * gt / (gt**2 + da**2) ** 2


def xi_cavity_single(params: Params, omega: complex | None = None) -> float:
    """Friction rate of one emitter inside a resonant lossy cavity.

    The cavity dresses the linewidth: the velocity-independent response
    carries width gamma*(1 + 3C/4), the linear response gamma*(1 + C/4),
    and the numerator gains the Purcell factor (1 + C/2).
    """
    osq = _omega_sq(params, omega, cavity=True)
    gt = params.gamma_tot
    da = params.delta_a
    c = cooperativity(params)
    denom = (da**2 + gt**2 * (1.0 + c / 4.0) ** 2) * \
            (da**2 + gt**2 * (1.0 + 3.0 * c / 4.0) ** 2)
    return 4.0 * osq * params.omega_rec * da * gt * (1.0 + c / 2.0) / denom


def xi_cavity_many(params: Params, omega: complex | None = None) -> float:
    """Per-emitter friction rate for n_emitters coupled to the same mode.

    The collective back-action widens only the second Lorentzian, by
    gamma*(1 + (2N+1)C/4); at N = 1 this is exactly the single-emitter
    rate.
    """
    osq = _omega_sq(params, omega, cavity=True)
    gt = params.gamma_tot
    da = params.delta_a
    c = cooperativity(params)
    nn = params.n_emitters
    denom = (gt**2 * (1.0 + c / 4.0) ** 2 + da**2) * \
            (gt**2 * (1.0 + c * (2.0 * nn + 1.0) / 4.0) ** 2 + da**2)
    return 4.0 * osq * params.omega_rec * da * gt * (1.0 + c / 2.0) / denom


def mu_free_space(params: Params, omega: complex | None = None) -> float:
    """Rate of population loss into the dark level (zero when gamma_prime is)."""
    osq = _omega_sq(params, omega)
    gt = params.gamma_tot
    return params.gamma_prime * osq / (params.delta_a**2 + gt**2)


def v_of_t_nonclosed_fs(params: Params, v0: float, t,
                        omega: complex | None = None):
    """Velocity decay of a leaky emitter in free space.

    The friction rate itself decays with the ground-state population, so
    the velocity stalls at a finite value instead of reaching zero.
    """
    xi = xi_free_space(params, omega)
    mu = mu_free_space(params, omega)
    t = np.asarray(t, dtype=float)
    if mu == 0.0:
        return v0 * np.exp(-xi * t)
    return v0 * np.exp((xi / mu) * (np.exp(-mu * t) - 1.0))


def final_velocity_fs(params: Params, v0: float) -> float:
    """Free-space velocity once all population has leaked to the dark level.

    Degenerate for gamma_prime = 0 (the cycle never empties): returns 0.
    """
    if params.gamma_prime == 0.0:
        return 0.0
    gt = params.gamma_tot
    da = params.delta_a
    exponent = 4.0 * params.omega_rec * gt * da / \
        (params.gamma_prime * (da**2 + gt**2))
    return v0 * np.exp(-exponent)


def v_of_t_nonclosed_cavity_regime_i(params: Params, v0: float, t,
                                     omega: complex | None = None):
    """Cavity velocity decay in the two-sideband regime.

    The Purcell contribution rides on the squared ground-state population,
    hence the extra (C/4)*(exp(-2 mu t) - 1) term in the exponent.
    """
    xi = xi_free_space(params, omega)
    mu = mu_free_space(params, omega)
    c = cooperativity(params)
    t = np.asarray(t, dtype=float)
    if mu == 0.0:
        return v0 * np.exp(-xi * (1.0 + c / 2.0) * t)
    return v0 * np.exp((xi / mu) * ((np.exp(-mu * t) - 1.0)
                                    + (c / 4.0) * (np.exp(-2.0 * mu * t) - 1.0)))


def final_velocity_ratio_cavity(params: Params) -> float:
    """Cavity/free-space final-velocity ratio in the two-sideband regime."""
    if params.gamma_prime == 0.0:
        return 1.0
    xi = xi_free_space(params, effective_drive(params, ScenarioKind.CAVITY_NONCLOSED))
    mu = mu_free_space(params, effective_drive(params, ScenarioKind.CAVITY_NONCLOSED))
    c = cooperativity(params)
    return float(np.exp(-(xi / mu) * c / 4.0))


@dataclass(frozen=True)
class ExponentIntegral:
    """Lifetime-integrated friction, evaluated two independent ways."""

    quadrature: float
    closed_form: float
    quad_error: float


def final_velocity_exponent_integral(params: Params,
                                     n_emitters: int | None = None,
                                     abs_tol: float = 1e-10) -> ExponentIntegral:
    """Integral of the friction rate over the full population-loss history.

    The quadrature substitutes the ground-state population for time and
    integrates the friction rate divided by the population-loss rate over
    n_g in [0, 1], keeping the collectively broadened factors in both
    numerator and denominator; their cancellation makes the result
    independent of the emitter number.  The closed form is the
    leading-order expansion in the cooperativity.
    """
    if params.gamma_prime <= 0:
        raise ValueError("final_velocity_exponent_integral: needs gamma_prime > 0")
    nn = params.n_emitters if n_emitters is None else n_emitters
    gt = params.gamma_tot
    gp = params.gamma_prime
    da = params.delta_a
    c = cooperativity(params)
    osq = _omega_sq(params, None)
    wr = params.omega_rec
    coll = (2.0 * nn + 1.0) * c / 4.0

    def integrand(ng: float) -> float:
        xi = 4.0 * osq * wr * da * gt * ng * (1.0 + c * ng / 2.0) / (
            (da**2 + gt**2 * (1.0 + c * ng / 4.0) ** 2)
            * (da**2 + gt**2 * (1.0 + coll * ng) ** 2))
        dt_dng = (gt**2 * (1.0 + coll * ng) ** 2 + da**2) / (gp * osq * ng)
        return xi * dt_dng

    value, err = quad(integrand, 0.0, 1.0, epsabs=abs_tol, epsrel=1e-12, limit=200)
    if err > max(abs_tol, 1e-12 * abs(value)) * 10:
        raise RuntimeError(
            f"final_velocity_exponent_integral: quadrature error {err:.3e} "
            f"exceeds requested tolerance {abs_tol:.1e}")

    xi_fs = 4.0 * osq * wr * da * gt / (gt**2 + da**2) ** 2
    mu_fs = gp * osq / (da**2 + gt**2)
    closed = (xi_fs / mu_fs) * (1.0 + c * da**2 / (4.0 * (da**2 + gt**2)))
    return ExponentIntegral(quadrature=value, closed_form=closed, quad_error=err)


def predict_rates(params: Params, kind: ScenarioKind,
                  kv: float = 0.0) -> RatePrediction:
    """Analytic rate prediction for one scenario, with validity flags."""
    if kind.is_cavity:
        omega = effective_drive(params, kind)
        if kind.is_many:
            xi = xi_cavity_many(params, omega)
        else:
            xi = xi_cavity_single(params, omega)
        reg_ok = regime_i_ok(params)
    else:
        omega = complex(params.omega)
        xi = xi_free_space(params, omega)
        reg_ok = True
    mu = 0.0 if params.gamma_prime == 0.0 else mu_free_space(params, omega)
    small = abs(kv) < abs(params.delta_a) if params.delta_a != 0 else kv == 0
    return RatePrediction(xi=xi, mu=mu, small_doppler_ok=small, regime_i_ok=reg_ok)
