"""Scenario runner: figure-style datasets, parameter sweeps and the
self-validation suite.

Every dataset the plotting side needs is written here as CSV plus a TOML
manifest echoing the resolved parameters and the sha256 of each artifact,
so downstream consumers never recompute physics.  Identical invocations
produce byte-identical files: fixed seeds, fixed summation order and
shortest round-trip float formatting.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import analytics, floquet
from .core import (Params, RunControls, Scenario, ScenarioKind, cooperativity,
                   effective_drive, format_manifest)
from .dynamics import (FitError, Trajectory, default_max_step,
                       fit_cooling_rate, initial_state, integrate,
                       operational_final_velocity, solve_ng_ode)


@dataclass(frozen=True)
class RunSpec:
    """One named simulation with its fully resolved configuration."""

    name: str
    params: Params
    scenario: Scenario
    controls: RunControls


@dataclass(frozen=True)
class SweepSpec:
    """A family of runs along one parameter axis.

    axis is a dotted key path into the config ("params.g", ...) or the
    pseudo-axis "cooperativity", realized by varying g at fixed kappa and
    gamma_tot.  With paired=True every point also runs a free-space twin
    at the matched drive strength.
    """

    base: RunSpec
    axis: str
    values: tuple[float, ...]
    paired: bool = True

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("sweep: empty axis value list")
        diffs = np.diff(np.asarray(self.values, dtype=float))
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep: axis values must be strictly monotone")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sweep: axis values must be finite")


# --- artifact writing ------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_atomic(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def write_csv(path: str, columns: dict[str, np.ndarray]) -> str:
    """Write named columns as RFC-4180 CSV; returns the sha256 hex digest."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    rows = zip(*(np.atleast_1d(columns[n]) for n in names))
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    data = buf.getvalue().encode()
    _write_atomic(path, data)
    return hashlib.sha256(data).hexdigest()


def write_run_manifest(path: str, spec: RunSpec,
                       artifacts: dict[str, str]) -> None:
    text = format_manifest(spec.params, spec.scenario, spec.controls, artifacts)
    _write_atomic(path, text.encode())


def run_and_write(spec: RunSpec, out_dir: str,
                  extra_columns=None) -> tuple[Trajectory, dict[str, str]]:
    """Integrate one RunSpec and write its trajectory CSV + manifest."""
    traj = integrate(spec.params, spec.scenario, spec.controls)
    cols = {"t": traj.times}
    names = spec.controls.observables or traj.default_observables()
    for name in names:
        cols[name] = traj.column(name)
    if extra_columns:
        cols.update(extra_columns(traj))
    csv_name = f"{spec.name}.csv"
    digest = write_csv(os.path.join(out_dir, csv_name), cols)
    artifacts = {csv_name: digest}
    write_run_manifest(os.path.join(out_dir, f"{spec.name}.manifest.toml"),
                       spec, artifacts)
    return traj, artifacts


# --- fit-window selection --------------------------------------------------

def small_doppler_window(traj: Trajectory, frac: float = 0.3,
                         settle: float = 20.0) -> tuple[float, float]:
    """Window where the Doppler shift is small against the detuning and the
    emitter is not yet trapped.

    Starts once |w| < frac*|delta_a| (never before the coherence transient
    has decayed), ends just before the first sign change of w.
    """
    t = traj.times
    w = traj.w(0)
    da = abs(traj.params.delta_a)
    small = np.abs(w) < frac * da if da > 0 else np.ones_like(w, bool)
    ok = small & (t >= settle / max(traj.params.gamma_tot, 1e-300))
    idx = np.nonzero(ok)[0]
    if idx.size == 0:
        raise FitError("no samples satisfy the small-Doppler condition")
    start = idx[0]
    sign0 = np.sign(w[start]) or 1.0
    flipped = np.nonzero(np.sign(w[start:]) == -sign0)[0]
    end = start + flipped[0] - 1 if flipped.size else w.size - 1
    if end <= start + 3:
        raise FitError("small-Doppler window too short to fit")
    # back off from the crossing: the ripple dominates once the envelope
    # is comparable to it
    t0, t1 = float(t[start]), float(t[end])
    return t0, t0 + 0.95 * (t1 - t0)


# --- built-in figure datasets ---------------------------------------------

_FS = ScenarioKind.FREE_SPACE_CLOSED
_CAV = ScenarioKind.CAVITY_CLOSED
_FSN = ScenarioKind.FREE_SPACE_NONCLOSED
_CAVN = ScenarioKind.CAVITY_NONCLOSED
_CAVNM = ScenarioKind.CAVITY_NONCLOSED_MANY


def _fs_twin_omega(params: Params) -> float:
    """Drive amplitude of the free-space twin of a cavity run."""
    return abs(effective_drive(params, _CAV))


def population_depletion_time(params: Params, threshold: float,
                              collective: bool = False) -> float:
    """Time for the semi-analytic ground-state population to reach threshold."""
    from scipy.integrate import quad
    gt = params.gamma_tot
    c = cooperativity(params) if (params.g > 0 and params.kappa > 0) else 0.0
    factor = (2.0 * params.n_emitters + 1.0) if collective else 3.0
    osq = abs(effective_drive(
        params, _CAVN if params.kappa > 0 and params.g > 0 else _FSN)) ** 2
    if params.gamma_prime <= 0 or osq == 0:
        raise ValueError("population never depletes without gamma_prime and drive")

    def dt_dng(ng):
        return (gt**2 * (1.0 + factor * c * ng / 4.0) ** 2
                + params.delta_a**2) / (params.gamma_prime * osq * ng)

    val, _ = quad(dt_dng, threshold, 1.0, limit=200)
    return val


def _depletion_t_end(params: Params, threshold: float = 1e-4,
                     collective: bool = False) -> float:
    return 1.25 * population_depletion_time(params, threshold, collective)


def fig2_specs() -> RunSpec:
    params = Params(gamma=1.0, delta_a=10.0, omega=1.0, omega_rec=0.5)
    controls = RunControls(t_end=6000.0, stride=5, kv0=18.0)
    return RunSpec("fig2_freespace", params, Scenario(_FS), controls)


def run_fig2(out_dir: str) -> dict[str, str]:
    spec = fig2_specs()
    xi = analytics.xi_free_space(spec.params)

    def overlays(traj):
        return {"w_exp_overlay": spec.controls.kv0 * np.exp(-xi * traj.times)}

    traj, artifacts = run_and_write(spec, out_dir, overlays)
    window = small_doppler_window(traj)
    report = fit_cooling_rate(traj, *window, analytic_rate=xi)
    digest = write_csv(os.path.join(out_dir, "fig2_rates.csv"), {
        "fitted_rate": np.array([report.fitted_rate]),
        "analytic_rate": np.array([xi]),
        "ratio": np.array([report.ratio]),
        "window_start": np.array([report.window[0]]),
        "window_end": np.array([report.window[1]]),
        "residual_rms": np.array([report.residual_rms]),
    })
    artifacts["fig2_rates.csv"] = digest
    write_run_manifest(os.path.join(out_dir, "fig2.manifest.toml"), spec,
                       artifacts)
    return artifacts


def fig3_specs(panel: str) -> tuple[RunSpec, RunSpec]:
    if panel == "a":
        cav = Params(gamma=1.0, kappa=1000.0, g=155.0, delta_a=200.0,
                     delta_c=200.0, eta=132.0, omega_rec=1.0)
        cav_ctrl = RunControls(t_end=1500.0, stride=40, kv0=30.0,
                               max_step=default_max_step(cav, _CAV))
        fs = replace(cav, kappa=0.0, g=0.0, eta=0.0, omega=_fs_twin_omega(cav))
        fs_ctrl = RunControls(t_end=11000.0, stride=20, kv0=30.0, rel_tol=1e-7)
    elif panel == "b":
        cav = Params(gamma=1.0, kappa=10.0, g=math.sqrt(5.0), delta_a=1.0,
                     delta_c=1.0, eta=0.6, omega_rec=0.02)
        cav_ctrl = RunControls(t_end=14000.0, stride=20, kv0=0.2,
                               max_step=default_max_step(cav, _CAV))
        fs = replace(cav, kappa=0.0, g=0.0, eta=0.0, omega=_fs_twin_omega(cav))
        fs_ctrl = RunControls(t_end=14000.0, stride=20, kv0=0.2)
    else:
        raise ValueError(f"unknown fig3 panel {panel!r}")
    return (RunSpec(f"fig3{panel}_cavity", cav, Scenario(_CAV), cav_ctrl),
            RunSpec(f"fig3{panel}_freespace", fs, Scenario(_FS), fs_ctrl))


def run_fig3(panel: str, out_dir: str) -> dict[str, str]:
    cav_spec, fs_spec = fig3_specs(panel)
    omega = _fs_twin_omega(cav_spec.params)
    xi_c = analytics.xi_cavity_single(cav_spec.params)
    xi_fs = analytics.xi_free_space(fs_spec.params)

    traj_c, artifacts = run_and_write(cav_spec, out_dir)
    traj_f, art_f = run_and_write(fs_spec, out_dir)
    artifacts.update(art_f)

    rep_c = fit_cooling_rate(traj_c, *small_doppler_window(traj_c),
                             analytic_rate=xi_c)
    rep_f = fit_cooling_rate(traj_f, *small_doppler_window(traj_f),
                             analytic_rate=xi_fs)
    c = cooperativity(cav_spec.params)
    digest = write_csv(os.path.join(out_dir, f"fig3{panel}_rates.csv"), {
        "fitted_rate_cavity": np.array([rep_c.fitted_rate]),
        "fitted_rate_freespace": np.array([rep_f.fitted_rate]),
        "ratio_fitted": np.array([rep_c.fitted_rate / rep_f.fitted_rate]),
        "ratio_analytic": np.array([xi_c / xi_fs]),
        "purcell_factor": np.array([1.0 + c / 2.0]),
        "cooperativity": np.array([c]),
        "omega_abs": np.array([omega]),
    })
    artifacts[f"fig3{panel}_rates.csv"] = digest
    write_run_manifest(os.path.join(out_dir, f"fig3{panel}.manifest.toml"),
                       cav_spec, artifacts)
    return artifacts


def fig4_specs(regime: str) -> tuple[RunSpec, RunSpec]:
    base = dict(gamma=0.85, gamma_prime=0.15, kappa=1000.0, g=155.0)
    if regime == "ab":
        cav = Params(delta_a=200.0, delta_c=200.0, eta=132.0, omega_rec=2.5,
                     **base)
        kv0 = 30.0
        t_cav = _depletion_t_end(cav)
        t_fs = t_cav
        stride = 500
    elif regime == "cd":
        cav = Params(delta_a=1.0, delta_c=1.0, eta=0.9, omega_rec=0.04, **base)
        kv0 = 0.2
        t_cav = _depletion_t_end(cav)
        t_fs = _depletion_t_end(
            replace(cav, kappa=0.0, g=0.0, eta=0.0, omega=_fs_twin_omega(cav)))
        stride = 2000
    else:
        raise ValueError(f"unknown fig4 regime {regime!r}")
    cav_ctrl = RunControls(t_end=t_cav, stride=stride, kv0=kv0,
                           max_step=default_max_step(cav, _CAVN))
    fs = replace(cav, kappa=0.0, g=0.0, eta=0.0, omega=_fs_twin_omega(cav))
    fs_ctrl = RunControls(t_end=t_fs, stride=50, kv0=kv0, rel_tol=1e-7)
    return (RunSpec(f"fig4{regime}_cavity", cav, Scenario(_CAVN), cav_ctrl),
            RunSpec(f"fig4{regime}_freespace", fs, Scenario(_FSN), fs_ctrl))


def run_fig4(regime: str, out_dir: str) -> dict[str, str]:
    cav_spec, fs_spec = fig4_specs(regime)
    params = cav_spec.params
    omega = _fs_twin_omega(params)
    mu = analytics.mu_free_space(params)
    kv0 = cav_spec.controls.kv0

    def overlays(traj):
        cols = {"ng_exp_overlay": np.exp(-mu * traj.times),
                "v_regime_i_overlay": analytics.v_of_t_nonclosed_cavity_regime_i(
                    params, kv0, traj.times)}
        if regime == "cd":
            cols["ng_semianalytic_overlay"] = solve_ng_ode(
                params, traj.times, variant="single")
            cols["ng_allorders_overlay"] = solve_ng_ode(
                params, traj.times, variant="infinite")
        return cols

    def overlays_fs(traj):
        return {"ng_exp_overlay": np.exp(-mu * traj.times),
                "v_overlay": analytics.v_of_t_nonclosed_fs(
                    fs_spec.params, kv0, traj.times)}

    traj_c, artifacts = run_and_write(cav_spec, out_dir, overlays)
    traj_f, art_f = run_and_write(fs_spec, out_dir, overlays_fs)
    artifacts.update(art_f)

    rows = {}
    threshold = cav_spec.controls.final_ng_threshold
    try:
        v_cav, t_cav = operational_final_velocity(traj_c, threshold)
        v_fs, t_fs = operational_final_velocity(traj_f, threshold)
        rows = {"v_final_cavity": np.array([v_cav]),
                "v_final_freespace": np.array([v_fs]),
                "t_final_cavity": np.array([t_cav]),
                "t_final_freespace": np.array([t_fs]),
                "threshold": np.array([threshold])}
    except FitError:
        pass
    rows["mu_fs"] = np.array([mu])
    rows["xi_fs"] = np.array([analytics.xi_free_space(params, omega)])
    rows["cooperativity"] = np.array([cooperativity(params)])
    digest = write_csv(os.path.join(out_dir, f"fig4{regime}_rates.csv"), rows)
    artifacts[f"fig4{regime}_rates.csv"] = digest
    write_run_manifest(os.path.join(out_dir, f"fig4{regime}.manifest.toml"),
                       cav_spec, artifacts)
    return artifacts


FIG5_COOPERATIVITIES = (0.1, 0.2, 0.5, 1.0, 3.0, 10.0)


def fig5_point_params(c: float) -> Params:
    """Cavity parameters for one cooperativity with drive strength pinned to
    |Omega|^2 = 0.01*(delta_a^2 + gamma_tot^2).

    delta_a = 5 keeps the two-sideband expansion parameter
    gamma_tot*C/(4*delta_a) small over the whole scanned range while the
    initial Doppler shift 0.2*delta_a stays well above the recoil frequency.
    """
    gamma, gamma_prime = 0.85, 0.15
    kappa, delta = 1000.0, 5.0
    g = math.sqrt(c * kappa * (gamma + gamma_prime))
    eta = math.sqrt(0.01 * (delta**2 + (gamma + gamma_prime) ** 2)
                    * (kappa**2 + delta**2) / g**2)
    return Params(gamma=gamma, gamma_prime=gamma_prime, kappa=kappa, g=g,
                  delta_a=delta, delta_c=delta, eta=eta, omega_rec=0.04)


def run_fig5(out_dir: str,
             cooperativities=FIG5_COOPERATIVITIES) -> dict[str, str]:
    artifacts: dict[str, str] = {}
    kv0 = 0.2 * fig5_point_params(cooperativities[0]).delta_a

    # the free-space twin is the same for every cooperativity: the drive
    # normalization pins |Omega| independently of g
    p0 = fig5_point_params(cooperativities[0])
    fs = replace(p0, kappa=0.0, g=0.0, eta=0.0, omega=_fs_twin_omega(p0))
    fs_ctrl = RunControls(t_end=_depletion_t_end(fs), stride=100, kv0=kv0,
                          rel_tol=1e-7)
    fs_spec = RunSpec("fig5_freespace", fs, Scenario(_FSN), fs_ctrl)
    traj_f, art_f = run_and_write(fs_spec, out_dir)
    artifacts.update(art_f)
    v_fs, _ = operational_final_velocity(traj_f, fs_ctrl.final_ng_threshold)

    cols = {name: [] for name in
            ("cooperativity", "g", "eta", "v_final_cavity", "v_final_freespace",
             "ln_ratio_measured", "ln_ratio_analytic", "exponent_quadrature")}
    for c in cooperativities:
        params = fig5_point_params(c)
        ctrl = RunControls(t_end=_depletion_t_end(params), stride=2000, kv0=kv0,
                           max_step=default_max_step(params, _CAVN))
        spec = RunSpec(f"fig5_c{_fmt(c)}_cavity", params, Scenario(_CAVN), ctrl)
        traj, art = run_and_write(spec, out_dir)
        artifacts.update(art)
        v_cav, _ = operational_final_velocity(traj, ctrl.final_ng_threshold)
        xi = analytics.xi_free_space(params)
        mu = analytics.mu_free_space(params)
        gt = params.gamma_tot
        da = params.delta_a
        ln_analytic = -(xi / mu) * (c / 4.0) * da**2 / (da**2 + gt**2)
        expo = analytics.final_velocity_exponent_integral(params)
        cols["cooperativity"].append(c)
        cols["g"].append(params.g)
        cols["eta"].append(params.eta)
        cols["v_final_cavity"].append(v_cav)
        cols["v_final_freespace"].append(v_fs)
        cols["ln_ratio_measured"].append(math.log(v_cav / v_fs))
        cols["ln_ratio_analytic"].append(ln_analytic)
        cols["exponent_quadrature"].append(expo.quadrature)
    digest = write_csv(os.path.join(out_dir, "fig5_ratios.csv"),
                       {k: np.array(v) for k, v in cols.items()})
    artifacts["fig5_ratios.csv"] = digest
    write_run_manifest(os.path.join(out_dir, "fig5.manifest.toml"),
                       fs_spec, artifacts)
    return artifacts


def fig7_specs() -> RunSpec:
    params = Params(gamma=0.7, gamma_prime=0.3, kappa=375.0, g=7.5,
                    delta_a=10.0, delta_c=10.0, eta=50.0, omega_rec=0.5,
                    n_emitters=400)
    t_end = _depletion_t_end(params, collective=True)
    controls = RunControls(t_end=t_end, stride=500, kv_mean=1.5, kv_std=0.1,
                           theta0="uniform", seed=7,
                           max_step=default_max_step(params, _CAVNM))
    return RunSpec("fig7_cavity", params, Scenario(_CAVNM), controls)


def run_fig7(out_dir: str) -> dict[str, str]:
    cav_spec = fig7_specs()
    params = cav_spec.params
    ctrl = cav_spec.controls
    threshold = ctrl.final_ng_threshold

    def overlays(traj):
        return {"ng_semianalytic_overlay": solve_ng_ode(
            traj.params, traj.times, variant="many")}

    traj_c, artifacts = run_and_write(cav_spec, out_dir, overlays)
    v_cav, t_cav = operational_final_velocity(traj_c, threshold)

    # free-space twin: the same ensemble, each emitter integrated
    # independently (no shared field couples them)
    fs = replace(params, kappa=0.0, g=0.0, eta=0.0,
                 omega=_fs_twin_omega(params), n_emitters=1)
    ens0 = initial_state(params, cav_spec.scenario, ctrl)
    t_fs_end = _depletion_t_end(fs)
    grid = np.linspace(0.0, t_fs_end, 2001)
    w_acc = np.zeros((grid.size, params.n_emitters))
    ng_acc = np.zeros_like(w_acc)
    for j, em in enumerate(ens0.emitters):
        fs_ctrl = RunControls(t_end=t_fs_end, stride=10, kv0=em.w,
                              theta0=em.theta, rel_tol=1e-7)
        traj = integrate(fs, Scenario(_FSN), fs_ctrl)
        w_acc[:, j] = np.interp(grid, traj.times, traj.w(0))
        ng_acc[:, j] = np.interp(grid, traj.times, traj.n_g(0))
    ng_mean = np.mean(ng_acc, axis=1)
    below = np.nonzero(ng_mean < threshold)[0]
    if below.size == 0:
        raise FitError("free-space ensemble population never reached threshold")
    idx = int(below[0])
    v_fs = float(np.mean(np.abs(w_acc[idx])))
    fs_cols = {"t": grid,
               "w_mean": np.mean(w_acc, axis=1),
               "w_std": np.std(w_acc, axis=1),
               "ng_mean": ng_mean,
               "ng_std": np.std(ng_acc, axis=1)}
    digest = write_csv(os.path.join(out_dir, "fig7_freespace.csv"), fs_cols)
    artifacts["fig7_freespace.csv"] = digest

    digest = write_csv(os.path.join(out_dir, "fig7_rates.csv"), {
        "v_final_cavity": np.array([v_cav]),
        "v_final_freespace": np.array([v_fs]),
        "relative_difference": np.array([abs(v_cav - v_fs) / v_fs]),
        "t_final_cavity": np.array([t_cav]),
        "t_final_freespace": np.array([float(grid[idx])]),
        "cooperativity": np.array([cooperativity(params)]),
        "collective_cooperativity": np.array(
            [params.n_emitters * cooperativity(params)]),
    })
    artifacts["fig7_rates.csv"] = digest
    write_run_manifest(os.path.join(out_dir, "fig7.manifest.toml"), cav_spec,
                       artifacts)
    return artifacts


FIGURES = {
    "fig2": run_fig2,
    "fig3a": lambda out: run_fig3("a", out),
    "fig3b": lambda out: run_fig3("b", out),
    "fig4ab": lambda out: run_fig4("ab", out),
    "fig4cd": lambda out: run_fig4("cd", out),
    "fig5": run_fig5,
    "fig7": run_fig7,
}


def run_figure(name: str, out_dir: str) -> dict[str, str]:
    """Produce one figure's dataset (CSV + manifest) in out_dir."""
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from "
                         + ", ".join(sorted(FIGURES)))
    os.makedirs(out_dir, exist_ok=True)
    return FIGURES[name](out_dir)


# --- sweeps ----------------------------------------------------------------

def _apply_axis(params: Params, axis: str, value: float) -> Params:
    if axis == "cooperativity":
        if params.kappa <= 0:
            raise ValueError("cooperativity axis needs kappa > 0")
        return replace(params, g=math.sqrt(value * params.kappa
                                           * params.gamma_tot))
    if axis.startswith("params."):
        field_name = axis.split(".", 1)[1]
        if not hasattr(params, field_name):
            raise ValueError(f"unknown axis {axis!r}")
        return replace(params, **{field_name: value})
    raise ValueError(f"unknown axis {axis!r} (use params.<field> or cooperativity)")


def run_sweep(spec: SweepSpec, out_dir: str) -> dict[str, str]:
    """Run every axis point (plus optional free-space twins) and tabulate
    final velocities, fitted rates and analytic predictions.

    Per-point failures are recorded in the error column; the sweep
    continues.
    """
    os.makedirs(out_dir, exist_ok=True)
    base = spec.base
    rows = {name: [] for name in
            ("value", "cooperativity", "v_final", "v_final_freespace",
             "fitted_rate", "xi_analytic", "mu_analytic", "error")}
    for value in spec.values:
        err = ""
        v_final = v_fs = fitted = float("nan")
        coop = float("nan")
        xi = mu = float("nan")
        try:
            params = _apply_axis(base.params, spec.axis, value)
            kind = base.scenario.kind
            coop = cooperativity(params) if params.kappa > 0 else 0.0
            pred = analytics.predict_rates(params, kind, base.controls.kv0)
            xi, mu = pred.xi, pred.mu
            ctrl = base.controls
            if kind.is_cavity and not math.isfinite(ctrl.max_step):
                ctrl = replace(ctrl, max_step=default_max_step(params, kind))
            traj = integrate(params, base.scenario, ctrl)
            if not kind.is_closed:
                try:
                    v_final, _ = operational_final_velocity(
                        traj, ctrl.final_ng_threshold)
                except FitError as exc:
                    err = str(exc)
            try:
                fitted = fit_cooling_rate(
                    traj, *small_doppler_window(traj)).fitted_rate
            except FitError:
                pass
            if spec.paired and kind.is_cavity:
                fs = replace(params, kappa=0.0, g=0.0, eta=0.0,
                             omega=_fs_twin_omega(params))
                fs_kind = _FS if kind.is_closed else _FSN
                fs_traj = integrate(fs, Scenario(fs_kind), replace(
                    ctrl, max_step=math.inf))
                if not kind.is_closed:
                    try:
                        v_fs, _ = operational_final_velocity(
                            fs_traj, ctrl.final_ng_threshold)
                    except FitError as exc:
                        err = err or str(exc)
        except Exception as exc:  # record and continue with the next point
            err = str(exc)
        rows["value"].append(value)
        rows["cooperativity"].append(coop)
        rows["v_final"].append(v_final)
        rows["v_final_freespace"].append(v_fs)
        rows["fitted_rate"].append(fitted)
        rows["xi_analytic"].append(xi)
        rows["mu_analytic"].append(mu)
        rows["error"].append(err)
    name = f"{base.name}_sweep.csv"
    cols = {k: (np.array(v) if k != "error" else v) for k, v in rows.items()}
    digest = write_csv(os.path.join(out_dir, name), cols)
    artifacts = {name: digest}
    write_run_manifest(os.path.join(out_dir, f"{base.name}_sweep.manifest.toml"),
                       base, artifacts)
    return artifacts


# --- validation suite ------------------------------------------------------

def run_validate(verbose_print=print) -> bool:
    """Execute the numerical-oracle suite; prints one line per check."""
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str) -> None:
        checks.append((name, bool(ok), detail))

    rng = np.random.default_rng(42)

    # ladder root: quadratic residual and reciprocal pairing
    worst_res = 0.0
    worst_pair = 0.0
    worst_mod = 0.0
    for _ in range(10_000):
        params = Params(gamma=float(rng.uniform(0.05, 5.0)),
                        delta_a=float(rng.uniform(-50.0, 50.0)),
                        g=float(rng.uniform(0.1, 50.0)),
                        kappa=float(rng.uniform(0.5, 2000.0)))
        lam = floquet.toeplitz_lambda(params)
        worst_res = max(worst_res, floquet.lambda_residual(params))
        worst_mod = max(worst_mod, abs(lam))
        a = (params.gamma_tot + 1j * params.delta_a) \
            + params.g**2 / (2.0 * params.kappa)
        c = params.g**2 / (4.0 * params.kappa)
        # the quadratic has reciprocal roots, so 1/lam must satisfy it too
        recip = 1.0 / lam
        worst_pair = max(worst_pair,
                         abs(c * recip * recip + a * recip + c) / abs(a * recip))
    check("lambda root residual < 1e-13", worst_res < 1e-13,
          f"max residual {worst_res:.3e}")
    check("reciprocal root residual < 1e-13", worst_pair < 1e-13,
          f"max residual {worst_pair:.3e}")
    check("|lambda| < 1 on all draws", worst_mod < 1.0,
          f"max |lambda| {worst_mod:.15f}")

    # ladder closed form vs dense solve at the default truncation
    params = Params(gamma=1.0, delta_a=3.0, g=20.0, kappa=40.0, eta=5.0,
                    delta_c=3.0)
    order = floquet.default_truncation_order(params)
    sol = floquet.floquet_cavity_infinite(params, order)
    harm, dense = floquet.dense_cavity_solve(params, 0.0, order + 40)
    ladder = (sol.b0,) + sol.higher
    errs = [abs(ladder[n] - dense[harm == 2 * n + 1][0]) / abs(ladder[0])
            for n in range(len(ladder))]
    check("ladder closed form vs dense solve < 1e-10",
          max(errs) < 1e-10, f"max rel delta {max(errs):.3e}")

    # linear-response coefficient vs central difference of the dense solve
    h = 1e-7
    _, bp = floquet.dense_cavity_solve(params, h, order + 40)
    _, bm = floquet.dense_cavity_solve(params, -h, order + 40)
    fd = (bp[harm == 1][0] - bm[harm == 1][0]) / (2.0 * h)
    check("ladder linear response vs dense finite difference < 1e-6",
          abs(fd - sol.b1) / abs(sol.b1) < 1e-6,
          f"rel delta {abs(fd - sol.b1) / abs(sol.b1):.3e}")

    # ensemble closed form vs dense solve up to 64 emitters
    worst = 0.0
    for nn in (1, 2, 8, 64):
        p = Params(gamma=1.0, delta_a=5.0, g=2.0, kappa=100.0, eta=3.0,
                   delta_c=5.0, n_emitters=nn)
        kv = rng.normal(0.0, 1.0, size=nn)
        sols = floquet.floquet_many_sherman_morrison(p, kv)
        bm_d, bp_d = floquet.dense_many_solve(p, kv)
        delta = max(max(abs(s.b_minus - dm) for s, dm in zip(sols, bm_d)),
                    max(abs(s.b_plus - dp) for s, dp in zip(sols, bp_d)))
        scale = max(abs(b) for b in bp_d)
        worst = max(worst, delta / scale)
        worst = max(worst, floquet.residual_many(p, kv, sols))
    check("ensemble closed form vs dense solve < 1e-10 (N <= 64)",
          worst < 1e-10, f"max rel delta {worst:.3e}")

    # limit reductions
    p = Params(gamma=1.3, gamma_prime=0.2, delta_a=7.0, g=2.0, kappa=50.0,
               delta_c=7.0, eta=1.0, omega_rec=0.3)
    xi_many_1 = analytics.xi_cavity_many(replace(p, n_emitters=1))
    xi_single = analytics.xi_cavity_single(p)
    ulp = abs(xi_single) * np.finfo(float).eps
    check("xi_cavity_many(N=1) == xi_cavity_single (<= 4 ulp)",
          abs(xi_many_1 - xi_single) <= 4 * ulp,
          f"delta {abs(xi_many_1 - xi_single):.3e}")
    p_free = replace(p, g=0.0, kappa=0.0, eta=0.0, omega=1.0)
    xi_c0 = analytics.xi_cavity_single(replace(p, g=0.0), omega=1.0)
    xi_f = analytics.xi_free_space(p_free)
    check("xi_cavity_single(C=0) == xi_free_space (<= 4 ulp)",
          abs(xi_c0 - xi_f) <= 4 * abs(xi_f) * np.finfo(float).eps,
          f"delta {abs(xi_c0 - xi_f):.3e}")
    sol_cav = floquet.floquet_cavity_2x2(replace(p, g=1e-30), 0.4, omega=1.0)
    sol_fs = floquet.floquet_free_space(p_free, 0.4)
    check("two-sideband solver -> free space as g -> 0",
          abs(sol_cav.b_plus - sol_fs.b_plus) <= 1e-12 * abs(sol_fs.b_plus),
          f"delta {abs(sol_cav.b_plus - sol_fs.b_plus):.3e}")

    # velocity parity: v -> -v swaps the sideband pair
    worst = 0.0
    for _ in range(10_000):
        pr = Params(gamma=float(rng.uniform(0.05, 5.0)),
                    delta_a=float(rng.uniform(-50.0, 50.0)),
                    g=float(rng.uniform(0.1, 30.0)),
                    kappa=float(rng.uniform(0.5, 2000.0)),
                    delta_c=0.0, eta=float(rng.uniform(0.1, 10.0)))
        pr = replace(pr, delta_c=pr.delta_a)
        kv = float(rng.uniform(-20.0, 20.0))
        s1 = floquet.floquet_cavity_2x2(pr, kv)
        s2 = floquet.floquet_cavity_2x2(pr, -kv)
        scale = max(abs(s1.b_plus), abs(s1.b_minus))
        worst = max(worst, abs(s1.b_plus - s2.b_minus) / scale,
                    abs(s1.b_minus - s2.b_plus) / scale)
    check("velocity parity swap on 10^4 draws", worst < 1e-14,
          f"max rel asymmetry {worst:.3e}")

    # lifetime-exponent quadrature: emitter-number independence and
    # O(C^2) agreement with the closed form
    pq = Params(gamma=0.85, gamma_prime=0.15, kappa=1000.0,
                g=math.sqrt(0.5 * 1000.0), delta_a=1.0, delta_c=1.0,
                eta=1.0, omega_rec=0.04)
    e1 = analytics.final_velocity_exponent_integral(pq, n_emitters=1)
    e400 = analytics.final_velocity_exponent_integral(pq, n_emitters=400)
    check("lifetime exponent independent of emitter number (1e-10)",
          abs(e1.quadrature - e400.quadrature) < 1e-10,
          f"delta {abs(e1.quadrature - e400.quadrature):.3e}")
    ratios = []
    for cval in (0.4, 0.2, 0.1, 0.05):
        pc = replace(pq, g=math.sqrt(cval * 1000.0))
        e = analytics.final_velocity_exponent_integral(pc)
        ratios.append(abs(e.quadrature - e.closed_form) / cval**2)
    spread = max(ratios) / min(ratios)
    check("quadrature vs closed form differs at O(C^2)", spread < 3.0,
          f"|diff|/C^2 spread factor {spread:.2f} over C halvings")

    # population conservation on a short stiff run
    from .dynamics import integrate as _integrate
    pp = Params(gamma=0.85, gamma_prime=0.15, kappa=100.0, g=15.0,
                delta_a=5.0, delta_c=5.0, eta=3.0, omega_rec=0.1)
    ctrl = RunControls(t_end=50.0, stride=10, kv0=1.0,
                       max_step=default_max_step(pp, _CAVN))
    traj = _integrate(pp, Scenario(_CAVN), ctrl)
    drift = np.max(np.abs(traj.n_g(0) + traj.n_e(0) + traj.n_i(0) - 1.0))
    check("population sum drift < 10*abs_tol", drift < 10 * ctrl.abs_tol,
          f"max drift {drift:.3e}")

    all_ok = True
    for name, ok, detail in checks:
        verbose_print(f"[{'PASS' if ok else 'FAIL'}] {name} ({detail})")
        all_ok = all_ok and ok
    return all_ok
