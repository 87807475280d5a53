"""Mean-field equations of motion, adaptive integration and rate fitting.

The six scenario right-hand sides live in compiled kernels; this module
provides the typed wrappers, initial-condition construction, trajectory
recording, the semi-analytic ground-state population equations and the
exponential-rate fit used to compare simulations against the closed-form
friction rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels as _k
from .core import (EmitterState, Params, RunControls, Scenario, ScenarioKind,
                   SystemState, cooperativity, effective_drive, validate_pair)
from .floquet import toeplitz_lambda


class IntegrationError(RuntimeError):
    """Step-size underflow or otherwise failed integration."""


class FitError(ValueError):
    """Requested fit window cannot support an exponential-rate fit."""


_KIND_ID = {
    ScenarioKind.FREE_SPACE_CLOSED: _k.FS_CLOSED,
    ScenarioKind.CAVITY_CLOSED: _k.CAV_CLOSED,
    ScenarioKind.FREE_SPACE_NONCLOSED: _k.FS_NONCLOSED,
    ScenarioKind.CAVITY_NONCLOSED: _k.CAV_NONCLOSED,
    ScenarioKind.CAVITY_CLOSED_MANY: _k.CAV_CLOSED_MANY,
    ScenarioKind.CAVITY_NONCLOSED_MANY: _k.CAV_NONCLOSED_MANY,
}


def _param_vector(params: Params) -> np.ndarray:
    return np.array([params.gamma, params.gamma_prime, params.kappa, params.g,
                     params.delta_a, params.delta_c, params.eta, params.omega,
                     params.omega_rec])


def pack_state(state: SystemState, kind: ScenarioKind) -> np.ndarray:
    """Flatten a SystemState into the kernel layout for the scenario."""
    n = len(state.emitters)
    kid = _KIND_ID[kind]
    y = np.zeros(_k.state_dim(kid, n))
    em = state.emitters
    if kid == _k.FS_CLOSED:
        e = em[0]
        y[:] = (e.beta.real, e.beta.imag, e.theta, e.w)
    elif kid == _k.CAV_CLOSED:
        e = em[0]
        y[:] = (state.alpha.real, state.alpha.imag,
                e.beta.real, e.beta.imag, e.theta, e.w)
    elif kid == _k.FS_NONCLOSED:
        e = em[0]
        y[:] = (e.beta.real, e.beta.imag, e.n_g, e.n_e, e.n_i, e.theta, e.w)
    elif kid == _k.CAV_NONCLOSED:
        e = em[0]
        y[:] = (state.alpha.real, state.alpha.imag, e.beta.real, e.beta.imag,
                e.n_g, e.n_e, e.n_i, e.theta, e.w)
    elif kid == _k.CAV_CLOSED_MANY:
        y[0], y[1] = state.alpha.real, state.alpha.imag
        for j, e in enumerate(em):
            y[2 + j] = e.beta.real
            y[2 + n + j] = e.beta.imag
            y[2 + 2 * n + j] = e.theta
            y[2 + 3 * n + j] = e.w
    else:
        y[0], y[1] = state.alpha.real, state.alpha.imag
        for j, e in enumerate(em):
            y[2 + j] = e.beta.real
            y[2 + n + j] = e.beta.imag
            y[2 + 2 * n + j] = e.n_g
            y[2 + 3 * n + j] = e.n_e
            y[2 + 4 * n + j] = e.n_i
            y[2 + 5 * n + j] = e.theta
            y[2 + 6 * n + j] = e.w
    return y


def unpack_state(y: np.ndarray, kind: ScenarioKind, n: int,
                 t: float = 0.0) -> SystemState:
    """Inverse of pack_state."""
    kid = _KIND_ID[kind]
    if kid == _k.FS_CLOSED:
        em = (EmitterState(beta=complex(y[0], y[1]), theta=y[2], w=y[3]),)
        alpha = 0.0j
    elif kid == _k.CAV_CLOSED:
        em = (EmitterState(beta=complex(y[2], y[3]), theta=y[4], w=y[5]),)
        alpha = complex(y[0], y[1])
    elif kid == _k.FS_NONCLOSED:
        em = (EmitterState(beta=complex(y[0], y[1]), n_g=y[2], n_e=y[3],
                           n_i=y[4], theta=y[5], w=y[6]),)
        alpha = 0.0j
    elif kid == _k.CAV_NONCLOSED:
        em = (EmitterState(beta=complex(y[2], y[3]), n_g=y[4], n_e=y[5],
                           n_i=y[6], theta=y[7], w=y[8]),)
        alpha = complex(y[0], y[1])
    elif kid == _k.CAV_CLOSED_MANY:
        alpha = complex(y[0], y[1])
        em = tuple(EmitterState(beta=complex(y[2 + j], y[2 + n + j]),
                                theta=y[2 + 2 * n + j], w=y[2 + 3 * n + j])
                   for j in range(n))
    else:
        alpha = complex(y[0], y[1])
        em = tuple(EmitterState(beta=complex(y[2 + j], y[2 + n + j]),
                                n_g=y[2 + 2 * n + j], n_e=y[2 + 3 * n + j],
                                n_i=y[2 + 4 * n + j], theta=y[2 + 5 * n + j],
                                w=y[2 + 6 * n + j])
                   for j in range(n))
    return SystemState(alpha=alpha, emitters=em, t=t)


def _rhs_state(state: SystemState, params: Params,
               kind: ScenarioKind) -> SystemState:
    n = len(state.emitters)
    kid = _KIND_ID[kind]
    y = pack_state(state, kind)
    dy = np.zeros_like(y)
    _k.rhs(kid, y, dy, _param_vector(params), n)
    return unpack_state(dy, kind, n, t=state.t)


def rhs_free_space_closed(state: SystemState, params: Params) -> SystemState:
    """Time derivative of a closed two-level emitter in a free-space standing wave."""
    return _rhs_state(state, params, ScenarioKind.FREE_SPACE_CLOSED)


def rhs_cavity_closed(state: SystemState, params: Params) -> SystemState:
    """Time derivative of a closed emitter coupled to a driven lossy cavity mode."""
    return _rhs_state(state, params, ScenarioKind.CAVITY_CLOSED)


def rhs_free_space_nonclosed(state: SystemState, params: Params) -> SystemState:
    """Free-space emitter with population leaking to the dark level."""
    return _rhs_state(state, params, ScenarioKind.FREE_SPACE_NONCLOSED)


def rhs_cavity_nonclosed(state: SystemState, params: Params) -> SystemState:
    """Leaky emitter coupled to a driven lossy cavity mode."""
    return _rhs_state(state, params, ScenarioKind.CAVITY_NONCLOSED)


def rhs_cavity_closed_many(state: SystemState, params: Params) -> SystemState:
    """One shared cavity amplitude driving an ensemble of closed emitters."""
    return _rhs_state(state, params, ScenarioKind.CAVITY_CLOSED_MANY)


def rhs_cavity_nonclosed_many(state: SystemState, params: Params) -> SystemState:
    """Shared cavity amplitude driving an ensemble of leaky emitters."""
    return _rhs_state(state, params, ScenarioKind.CAVITY_NONCLOSED_MANY)


def initial_state(params: Params, scenario: Scenario,
                  controls: RunControls) -> SystemState:
    """Default initial condition: dark internal state, configured motion.

    Ensembles get a uniform phase grid over one standing-wave period and
    Gaussian Doppler shifts from a seeded deterministic generator;
    single-emitter runs start at the configured phase and shift.
    """
    n = params.n_emitters
    if controls.kv_mean is not None:
        rng = np.random.default_rng(controls.seed)
        kv = rng.normal(controls.kv_mean, controls.kv_std, size=n)
    else:
        kv = np.full(n, controls.kv0)
    if controls.theta0 == "uniform":
        theta = 2.0 * np.pi * np.arange(n) / n
    else:
        theta = np.full(n, float(controls.theta0))
    em = tuple(EmitterState(theta=theta[j], w=kv[j]) for j in range(n))
    return SystemState(alpha=0.0j, emitters=em, t=0.0)


@dataclass
class Trajectory:
    """Recorded time series of one integration."""

    kind: ScenarioKind
    params: Params
    times: np.ndarray
    states: np.ndarray  # one packed state vector per recorded time
    n_steps: int
    n_rejected: int

    @property
    def n_emitters(self) -> int:
        return self.params.n_emitters

    def _slot(self, name: str, j: int) -> np.ndarray:
        kid = _KIND_ID[self.kind]
        n = self.n_emitters
        layouts = {
            _k.FS_CLOSED: {"beta_re": 0, "beta_im": 1, "theta": 2, "w": 3},
            _k.CAV_CLOSED: {"beta_re": 2, "beta_im": 3, "theta": 4, "w": 5},
            _k.FS_NONCLOSED: {"beta_re": 0, "beta_im": 1, "ng": 2, "ne": 3,
                              "ni": 4, "theta": 5, "w": 6},
            _k.CAV_NONCLOSED: {"beta_re": 2, "beta_im": 3, "ng": 4, "ne": 5,
                               "ni": 6, "theta": 7, "w": 8},
            _k.CAV_CLOSED_MANY: {"beta_re": 2, "beta_im": 2 + n,
                                 "theta": 2 + 2 * n, "w": 2 + 3 * n},
            _k.CAV_NONCLOSED_MANY: {"beta_re": 2, "beta_im": 2 + n,
                                    "ng": 2 + 2 * n, "ne": 2 + 3 * n,
                                    "ni": 2 + 4 * n, "theta": 2 + 5 * n,
                                    "w": 2 + 6 * n},
        }
        layout = layouts[kid]
        if name not in layout:
            raise KeyError(f"observable {name!r} not recorded for {self.kind.value}")
        base = layout[name]
        if kid in (_k.CAV_CLOSED_MANY, _k.CAV_NONCLOSED_MANY):
            return self.states[:, base + j]
        if j != 0:
            raise IndexError("single-emitter trajectory has only emitter 0")
        return self.states[:, base]

    def w(self, j: int = 0) -> np.ndarray:
        return self._slot("w", j)

    def theta(self, j: int = 0) -> np.ndarray:
        return self._slot("theta", j)

    def n_g(self, j: int = 0) -> np.ndarray:
        return self._slot("ng", j)

    def n_e(self, j: int = 0) -> np.ndarray:
        return self._slot("ne", j)

    def n_i(self, j: int = 0) -> np.ndarray:
        return self._slot("ni", j)

    def beta(self, j: int = 0) -> np.ndarray:
        return self._slot("beta_re", j) + 1j * self._slot("beta_im", j)

    def alpha(self) -> np.ndarray:
        if self.kind in (ScenarioKind.FREE_SPACE_CLOSED,
                         ScenarioKind.FREE_SPACE_NONCLOSED):
            return np.zeros_like(self.times, dtype=complex)
        return self.states[:, 0] + 1j * self.states[:, 1]

    def w_all(self) -> np.ndarray:
        """Doppler shifts of all emitters, shape (times, n_emitters)."""
        return np.stack([self.w(j) for j in range(self.n_emitters)], axis=1)

    def n_g_all(self) -> np.ndarray:
        return np.stack([self.n_g(j) for j in range(self.n_emitters)], axis=1)

    def column(self, name: str) -> np.ndarray:
        """Resolve an observable column name (CSV naming convention)."""
        if name == "t":
            return self.times
        if name == "abs_alpha":
            return np.abs(self.alpha())
        if name == "arg_alpha":
            return np.angle(self.alpha())
        for agg, fn in (("_mean", np.mean), ("_std", np.std)):
            if name.endswith(agg):
                base = name[:-len(agg)]
                stack = np.stack([self._slot(base, j)
                                  for j in range(self.n_emitters)], axis=1)
                return fn(stack, axis=1)
        base, _, idx = name.rpartition("_")
        if not idx.isdigit():
            raise KeyError(f"unknown observable {name!r}")
        j = int(idx)
        if base == "abs_beta":
            return np.abs(self.beta(j))
        return self._slot(base, j)

    def default_observables(self) -> tuple[str, ...]:
        kid = _KIND_ID[self.kind]
        cavity = self.kind.is_cavity
        closed = self.kind.is_closed
        if kid in (_k.CAV_CLOSED_MANY, _k.CAV_NONCLOSED_MANY):
            cols = ["w_mean", "w_std", "theta_0", "abs_beta_0"]
            if not closed:
                cols += ["ng_mean", "ng_std"]
        else:
            cols = ["w_0", "theta_0", "abs_beta_0"]
            if not closed:
                cols += ["ng_0", "ne_0", "ni_0"]
        if cavity:
            cols += ["abs_alpha", "arg_alpha"]
        return tuple(cols)


def integrate(params: Params, scenario: Scenario, controls: RunControls,
              initial: SystemState | None = None) -> Trajectory:
    """Run one adaptive integration and record the trajectory.

    Deterministic for fixed inputs.  Raises IntegrationError on step-size
    underflow, naming the failure time and the dominant error component.
    """
    validate_pair(params, scenario)
    if initial is None:
        initial = initial_state(params, scenario, controls)
    kid = _KIND_ID[scenario.kind]
    y0 = pack_state(initial, scenario.kind)
    ts, ys, n_steps, n_rej, status, t_fail, i_fail = _k.integrate_loop(
        kid, y0, _param_vector(params), params.n_emitters, controls.t_end,
        controls.rel_tol, controls.abs_tol, controls.max_step, controls.stride)
    if status != 0:
        raise IntegrationError(
            f"step size underflow at t = {t_fail:.6g} "
            f"(dominant error component index {i_fail}); the system is too "
            f"stiff for the configured max_step/tolerances")
    return Trajectory(kind=scenario.kind, params=params, times=ts, states=ys,
                      n_steps=n_steps, n_rejected=n_rej)


def default_max_step(params: Params, kind: ScenarioKind) -> float:
    """Stiffness guard: half the cavity lifetime for cavity scenarios."""
    if kind.is_cavity and params.kappa > 0:
        return 0.5 / params.kappa
    return math.inf


# --- semi-analytic ground-state population --------------------------------

def _cavity_omega_sq(params: Params) -> float:
    return abs(effective_drive(params, ScenarioKind.CAVITY_NONCLOSED)) ** 2


def ng_ode_single(params: Params, n_g: float) -> float:
    """Ground-state loss rate with the Purcell-broadened two-sideband width."""
    gt = params.gamma_tot
    c = cooperativity(params)
    osq = _cavity_omega_sq(params)
    return -params.gamma_prime * osq * n_g / (
        gt**2 * (1.0 + 3.0 * c * n_g / 4.0) ** 2 + params.delta_a**2)


def ng_ode_many(params: Params, n_g: float) -> float:
    """Ensemble ground-state loss rate; the width broadens collectively."""
    gt = params.gamma_tot
    c = cooperativity(params)
    nn = params.n_emitters
    osq = _cavity_omega_sq(params)
    return -params.gamma_prime * osq * n_g / (
        gt**2 * (1.0 + (2.0 * nn + 1.0) * c * n_g / 4.0) ** 2
        + params.delta_a**2)


def ng_ode_infinite_order(params: Params, n_g: float) -> float:
    """Ground-state loss rate keeping every sideband order.

    Uses the geometric ladder root evaluated at the instantaneous ground
    state; the returned value always carries the loss sign.  See
    ng_ode_infinite_order_checked for the sign bookkeeping.
    """
    return ng_ode_infinite_order_checked(params, n_g)[0]


def ng_ode_infinite_order_checked(params: Params,
                                  n_g: float) -> tuple[float, bool]:
    """As ng_ode_infinite_order, also reporting whether the closed-form
    expression came out with the (unphysical) gain sign and was flipped."""
    if n_g <= 0.0:
        # ladder root vanishes with the ground state; no drive, no loss
        return 0.0, False
    lam = toeplitz_lambda(params, n_g)
    osq = _cavity_omega_sq(params)
    two_re = 2.0 * lam.real
    mod_sq = abs(lam) ** 2
    num = mod_sq * (4.0 + two_re) + two_re
    den = abs(lam - 1.0) ** 2 * (1.0 - mod_sq)
    rate = (params.gamma_prime / params.gamma_tot) \
        * (2.0 * params.kappa * osq / params.g**2) * num / den
    if rate > 0.0:
        return -rate, True
    return rate, False


_NG_VARIANTS = {
    "single": ng_ode_single,
    "many": ng_ode_many,
    "infinite": ng_ode_infinite_order,
}


def solve_ng_ode(params: Params, t_grid, variant: str = "single") -> np.ndarray:
    """Integrate one of the semi-analytic population equations on t_grid."""
    rate = _NG_VARIANTS[variant]
    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(lambda t, y: [rate(params, y[0])],
                    (t_grid[0], t_grid[-1]), [1.0], t_eval=t_grid,
                    rtol=1e-10, atol=1e-12, method="RK45")
    if not sol.success:
        raise IntegrationError(f"population equation failed: {sol.message}")
    return sol.y[0]


# --- rate fitting ----------------------------------------------------------

@dataclass(frozen=True)
class RateReport:
    """Fitted exponential decay rate with diagnostics (and the analytic
    prediction when one was supplied)."""

    fitted_rate: float
    window: tuple[float, float]
    residual_rms: float
    n_points: int
    analytic_rate: float | None = None

    @property
    def ratio(self) -> float | None:
        if self.analytic_rate in (None, 0.0):
            return None
        return self.fitted_rate / self.analytic_rate


def fit_cooling_rate(traj: Trajectory, t_start: float, t_end: float,
                     emitter: int = 0,
                     analytic_rate: float | None = None) -> RateReport:
    """Least-squares decay rate of the velocity envelope over a window.

    The recorded Doppler shift carries a ripple at twice the standing-wave
    frequency; a boxcar average over one instantaneous Doppler period
    (re-estimated as the emitter slows) strips it before fitting
    ln(w) linearly in time.
    """
    times = traj.times
    mask = (times >= t_start) & (times <= t_end)
    tt = times[mask]
    ww = traj.w(emitter)[mask]
    if tt.size < 4:
        raise FitError("fit window contains fewer than 4 samples")
    if np.min(ww) < 0.0 < np.max(ww):
        raise FitError("velocity crosses zero inside the fit window "
                       "(emitter trapped); shrink the window")
    sign = 1.0 if ww[0] > 0 else -1.0
    ww = sign * ww
    if (tt[-1] - tt[0]) < math.pi / np.max(ww):
        raise FitError("fit window shorter than one Doppler period")

    seg_t = []
    seg_w = []
    i = 0
    while i < tt.size - 2:
        period = math.pi / max(ww[i], 1e-300)
        j = int(np.searchsorted(tt, tt[i] + period))
        if j >= tt.size:
            break
        if j <= i + 1:
            j = i + 2
        seg_t.append(0.5 * (tt[i] + tt[j]))
        seg_w.append(np.trapezoid(ww[i:j + 1], tt[i:j + 1]) / (tt[j] - tt[i]))
        i = j
    if len(seg_t) < 3:
        raise FitError("fit window holds fewer than 3 Doppler periods")
    seg_t = np.array(seg_t)
    seg_w = np.array(seg_w)
    if np.any(seg_w <= 0.0):
        raise FitError("velocity envelope reaches zero inside the fit window")
    slope, intercept = np.polyfit(seg_t, np.log(seg_w), 1)
    resid = np.log(seg_w) - (slope * seg_t + intercept)
    return RateReport(fitted_rate=float(-slope),
                      window=(float(tt[0]), float(tt[-1])),
                      residual_rms=float(np.sqrt(np.mean(resid**2))),
                      n_points=len(seg_t),
                      analytic_rate=analytic_rate)


def operational_final_velocity(traj: Trajectory,
                               threshold: float = 1e-4) -> tuple[float, float]:
    """Mean |Doppler shift| at the first recorded time the mean ground-state
    population drops below the threshold.

    Returns (velocity, time).  Raises FitError if the population never
    reaches the threshold within the trajectory.
    """
    ng = np.mean(traj.n_g_all(), axis=1)
    below = np.nonzero(ng < threshold)[0]
    if below.size == 0:
        raise FitError(
            f"ground-state population never fell below {threshold:g} "
            f"(min {float(ng.min()):.3g}); extend t_end")
    idx = int(below[0])
    w_final = float(np.mean(np.abs(traj.w_all()[idx])))
    return w_final, float(traj.times[idx])
