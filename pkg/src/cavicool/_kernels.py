"""Compiled right-hand sides and the adaptive Runge-Kutta driver.

State vectors are flat float64 arrays with complex quantities split into
real/imaginary pairs.  Layouts per scenario id:

  0  free-space closed         [Re b, Im b, theta, w]
  1  cavity closed             [Re a, Im a, Re b, Im b, theta, w]
  2  free-space non-closed     [Re b, Im b, n_g, n_e, n_i, theta, w]
  3  cavity non-closed         [Re a, Im a, Re b, Im b, n_g, n_e, n_i, theta, w]
  4  cavity closed, N emitters     [Re a, Im a, Re b[N], Im b[N], theta[N], w[N]]
  5  cavity non-closed, N emitters [Re a, Im a, Re b[N], Im b[N],
                                    n_g[N], n_e[N], n_i[N], theta[N], w[N]]

Parameter vector: [gamma, gamma_prime, kappa, g, delta_a, delta_c, eta,
omega, omega_rec].  All emitter sums run left to right so results are
bit-deterministic.
"""

import math

import numpy as np
from numba import njit

FS_CLOSED = 0
CAV_CLOSED = 1
FS_NONCLOSED = 2
CAV_NONCLOSED = 3
CAV_CLOSED_MANY = 4
CAV_NONCLOSED_MANY = 5


def state_dim(kind_id: int, n: int) -> int:
    return {0: 4, 1: 6, 2: 7, 3: 9, 4: 2 + 4 * n, 5: 2 + 7 * n}[kind_id]


@njit(cache=True)
def rhs(kind_id, y, dy, p, n):
    gamma = p[0]
    gamma_prime = p[1]
    kappa = p[2]
    g = p[3]
    delta_a = p[4]
    delta_c = p[5]
    eta = p[6]
    omega = p[7]
    omega_rec = p[8]
    gt = gamma + gamma_prime

    if kind_id == FS_CLOSED:
        br, bi, th, w = y[0], y[1], y[2], y[3]
        ct = math.cos(th)
        st = math.sin(th)
        dy[0] = -gamma * br + delta_a * bi
        dy[1] = -gamma * bi - delta_a * br - omega * ct
        dy[2] = w
        dy[3] = 4.0 * omega_rec * omega * st * br
    elif kind_id == CAV_CLOSED:
        ar, ai, br, bi, th, w = y[0], y[1], y[2], y[3], y[4], y[5]
        ct = math.cos(th)
        st = math.sin(th)
        gc = g * ct
        dy[0] = -kappa * ar + delta_c * ai + gc * bi - eta
        dy[1] = -kappa * ai - delta_c * ar - gc * br
        dy[2] = -gamma * br + delta_a * bi + gc * ai
        dy[3] = -gamma * bi - delta_a * br - gc * ar
        dy[4] = w
        dy[5] = 4.0 * omega_rec * g * st * (br * ar + bi * ai)
    elif kind_id == FS_NONCLOSED:
        br, bi = y[0], y[1]
        ng, ne = y[2], y[3]
        th, w = y[5], y[6]
        ct = math.cos(th)
        st = math.sin(th)
        pump = 2.0 * omega * ct * bi
        dy[0] = -gt * br + delta_a * bi
        dy[1] = -gt * bi - delta_a * br - omega * ct * (ng - ne)
        dy[2] = 2.0 * gamma * ne + pump
        dy[3] = -2.0 * gt * ne - pump
        dy[4] = 2.0 * gamma_prime * ne
        dy[5] = w
        dy[6] = 4.0 * omega_rec * omega * st * br
    elif kind_id == CAV_NONCLOSED:
        ar, ai, br, bi = y[0], y[1], y[2], y[3]
        ng, ne = y[4], y[5]
        th, w = y[7], y[8]
        ct = math.cos(th)
        st = math.sin(th)
        gc = g * ct
        pump = 2.0 * gc * (bi * ar - br * ai)
        dy[0] = -kappa * ar + delta_c * ai + gc * bi - eta
        dy[1] = -kappa * ai - delta_c * ar - gc * br
        dy[2] = -gt * br + delta_a * bi + gc * ai * (ng - ne)
        dy[3] = -gt * bi - delta_a * br - gc * ar * (ng - ne)
        dy[4] = 2.0 * gamma * ne + pump
        dy[5] = -2.0 * gt * ne - pump
        dy[6] = 2.0 * gamma_prime * ne
        dy[7] = w
        dy[8] = 4.0 * omega_rec * g * st * (br * ar + bi * ai)
    elif kind_id == CAV_CLOSED_MANY:
        ar, ai = y[0], y[1]
        sr = 0.0
        si = 0.0
        for j in range(n):
            br = y[2 + j]
            bi = y[2 + n + j]
            th = y[2 + 2 * n + j]
            ct = math.cos(th)
            sr += ct * br
            si += ct * bi
        dy[0] = -kappa * ar + delta_c * ai + g * si - eta
        dy[1] = -kappa * ai - delta_c * ar - g * sr
        for j in range(n):
            br = y[2 + j]
            bi = y[2 + n + j]
            th = y[2 + 2 * n + j]
            w = y[2 + 3 * n + j]
            ct = math.cos(th)
            st = math.sin(th)
            gc = g * ct
            dy[2 + j] = -gamma * br + delta_a * bi + gc * ai
            dy[2 + n + j] = -gamma * bi - delta_a * br - gc * ar
            dy[2 + 2 * n + j] = w
            dy[2 + 3 * n + j] = 4.0 * omega_rec * g * st * (br * ar + bi * ai)
    else:  # CAV_NONCLOSED_MANY
        ar, ai = y[0], y[1]
        sr = 0.0
        si = 0.0
        for j in range(n):
            br = y[2 + j]
            bi = y[2 + n + j]
            th = y[2 + 5 * n + j]
            ct = math.cos(th)
            sr += ct * br
            si += ct * bi
        dy[0] = -kappa * ar + delta_c * ai + g * si - eta
        dy[1] = -kappa * ai - delta_c * ar - g * sr
        for j in range(n):
            br = y[2 + j]
            bi = y[2 + n + j]
            ng = y[2 + 2 * n + j]
            ne = y[2 + 3 * n + j]
            th = y[2 + 5 * n + j]
            w = y[2 + 6 * n + j]
            ct = math.cos(th)
            st = math.sin(th)
            gc = g * ct
            pump = 2.0 * gc * (bi * ar - br * ai)
            dy[2 + j] = -gt * br + delta_a * bi + gc * ai * (ng - ne)
            dy[2 + n + j] = -gt * bi - delta_a * br - gc * ar * (ng - ne)
            dy[2 + 2 * n + j] = 2.0 * gamma * ne + pump
            dy[2 + 3 * n + j] = -2.0 * gt * ne - pump
            dy[2 + 4 * n + j] = 2.0 * gamma_prime * ne
            dy[2 + 5 * n + j] = w
            dy[2 + 6 * n + j] = 4.0 * omega_rec * g * st * (br * ar + bi * ai)


# Dormand-Prince 5(4) tableau; the fifth-order solution propagates and the
# embedded fourth-order difference estimates the local error.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True)
def integrate_loop(kind_id, y0, p, n, t_end, rel_tol, abs_tol, max_step,
                   stride):
    """Adaptive fifth-order integration from t=0 to t_end.

    Records the initial state, every stride-th accepted step and the final
    state.  Returns (times, states, n_steps, n_rejected, status, t_fail,
    i_fail); status 1 flags step-size underflow at t_fail with the error
    dominated by component i_fail.
    """
    dim = y0.size
    y = y0.copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    k5 = np.empty(dim)
    k6 = np.empty(dim)
    k7 = np.empty(dim)
    ytmp = np.empty(dim)
    ynew = np.empty(dim)

    cap = 4096
    ts = np.empty(cap)
    ys = np.empty((cap, dim))
    nrec = 0
    ts[0] = 0.0
    ys[0, :] = y
    nrec = 1

    t = 0.0
    h = min(max_step, 1e-3, t_end)
    n_steps = 0
    n_rejected = 0
    status = 0
    t_fail = 0.0
    i_fail = -1
    since_record = 0

    rhs(kind_id, y, k1, p, n)
    while t < t_end:
        if h > t_end - t:
            h = t_end - t
        if h < 1e-13 * max(1.0, abs(t)):
            status = 1
            t_fail = t
            break

        for i in range(dim):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        rhs(kind_id, ytmp, k2, p, n)
        for i in range(dim):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        rhs(kind_id, ytmp, k3, p, n)
        for i in range(dim):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        rhs(kind_id, ytmp, k4, p, n)
        for i in range(dim):
            ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i]
                                  + _A54 * k4[i])
        rhs(kind_id, ytmp, k5, p, n)
        for i in range(dim):
            ytmp[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                  + _A64 * k4[i] + _A65 * k5[i])
        rhs(kind_id, ytmp, k6, p, n)
        for i in range(dim):
            ynew[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                  + _B5 * k5[i] + _B6 * k6[i])
        rhs(kind_id, ynew, k7, p, n)

        # mixed abs/rel error norm of the embedded 4th-order difference
        err_sq = 0.0
        worst = 0.0
        worst_i = 0
        for i in range(dim):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = abs_tol + rel_tol * max(abs(y[i]), abs(ynew[i]))
            r = e / sc
            err_sq += r * r
            if abs(r) > worst:
                worst = abs(r)
                worst_i = i
        err = math.sqrt(err_sq / dim)

        if err <= 1.0:
            t += h
            for i in range(dim):
                y[i] = ynew[i]
                k1[i] = k7[i]
            n_steps += 1
            since_record += 1
            if since_record >= stride or t >= t_end:
                if nrec == cap:
                    cap *= 2
                    ts2 = np.empty(cap)
                    ys2 = np.empty((cap, dim))
                    ts2[:nrec] = ts[:nrec]
                    ys2[:nrec, :] = ys[:nrec, :]
                    ts = ts2
                    ys = ys2
                ts[nrec] = t
                ys[nrec, :] = y
                nrec += 1
                since_record = 0
        else:
            n_rejected += 1
            i_fail = worst_i

        if err == 0.0:
            fac = 5.0
        else:
            fac = 0.9 * err ** -0.2
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
        h = min(h * fac, max_step)

    if status == 1:
        t_fail = t
    return ts[:nrec].copy(), ys[:nrec, :].copy(), n_steps, n_rejected, \
        status, t_fail, i_fail
