"""Cool a single closed emitter in a free-space standing wave and compare
the fitted velocity-decay rate with the analytic friction rate.

Run:  python3 demos/free_space_cooling.py
"""

from cavicool import (Params, RunControls, Scenario, ScenarioKind,
                      fit_cooling_rate, integrate, xi_free_space)
from cavicool.experiments import small_doppler_window

params = Params(gamma=1.0, delta_a=10.0, omega=1.0, omega_rec=0.5)
controls = RunControls(t_end=4000.0, stride=5, kv0=18.0)

print(f"integrating: kv0 = {controls.kv0}, delta_a = {params.delta_a}")
traj = integrate(params, Scenario(ScenarioKind.FREE_SPACE_CLOSED), controls)
print(f"  {traj.n_steps} accepted steps, {traj.n_rejected} rejected")

# the linear-friction prediction only applies once kv << delta_a and
# before the emitter is trapped in a standing-wave well
window = small_doppler_window(traj)
xi = xi_free_space(params)
report = fit_cooling_rate(traj, *window, analytic_rate=xi)

print(f"fit window: t in [{window[0]:.0f}, {window[1]:.0f}]")
print(f"fitted rate:   {report.fitted_rate:.6e}")
print(f"analytic rate: {xi:.6e}")
print(f"ratio:         {report.ratio:.3f}")

w = traj.w(0)
trapped = (w[:-1] * w[1:] < 0).argmax()
theta = traj.theta(0)[trapped:]
print(f"trapped near t = {traj.times[trapped]:.0f}; phase excursion "
      f"afterwards = {theta.max() - theta.min():.2f} rad (< pi = one well)")
