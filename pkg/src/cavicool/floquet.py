"""Steady-state sideband coefficients of the emitter coherence.

The coherence of a driven emitter in a standing wave decomposes into odd
spatial harmonics.  In free space only the first pair is driven and the
pair decouples; a lossy cavity couples all odd orders through a
tridiagonal Toeplitz system whose inverse is known in closed form via the
geometric root `lambda`.  For several emitters sharing the mode the
first-order coefficients follow from a rank-one (Sherman-Morrison)
inversion.

Each closed form here is paired with a dense linear-algebra oracle
(`dense_*`, `residual_*`) used by the validation suite; the oracles solve
the defining system directly and never reuse the closed forms.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, Params, ScenarioKind, cooperativity, effective_drive


@dataclass(frozen=True)
class FloquetSolution:
    """First-order sideband pair and its small-Doppler expansion.

    b_plus/b_minus solve the steady-state system at the given Doppler
    shift; b0 and b1 are defined by b_{+-1} ~= b0 +- kv*b1.  `higher`
    holds the velocity-independent coefficients of harmonics 3, 5, ... and
    `lam` the in-disk root of the Toeplitz recursion when one was used.
    """

    b_minus: complex
    b_plus: complex
    b0: complex
    b1: complex
    higher: tuple[complex, ...] = ()
    lam: complex | None = None
    regime_i_ok: bool = True


def _drive(params: Params, omega, cavity: bool) -> complex:
    if omega is not None:
        return complex(omega)
    kind = ScenarioKind.CAVITY_CLOSED if cavity else ScenarioKind.FREE_SPACE_CLOSED
    return effective_drive(params, kind)


def _require_resonant(params: Params) -> None:
    if params.delta_c != params.delta_a:
        raise ValueError(
            "cavity sideband solvers require the cavity resonant with the "
            f"emitter (delta_c == delta_a), got delta_c - delta_a = "
            f"{params.delta_c - params.delta_a!r}")


def floquet_free_space(params: Params, kv: float,
                       omega: complex | None = None) -> FloquetSolution:
    """Uncoupled first-order sidebands of a free-space standing-wave drive."""
    om = _drive(params, omega, cavity=False)
    gt = params.gamma_tot
    da = params.delta_a
    b_plus = -1j * om / (2.0 * (gt + 1j * (da + kv)))
    b_minus = -1j * om / (2.0 * (gt + 1j * (da - kv)))
    d = gt + 1j * da
    return FloquetSolution(b_minus=b_minus, b_plus=b_plus,
                           b0=-1j * om / (2.0 * d), b1=-om / (2.0 * d**2))


def floquet_cavity_2x2(params: Params, kv: float,
                       omega: complex | None = None) -> FloquetSolution:
    """Two-sideband truncation of the cavity-coupled harmonic system.

    Valid while gamma_tot*C/(4*delta_a) is small; the returned
    regime_i_ok flag is cleared otherwise.  Requires the cavity resonant
    with the emitter.
    """
    _require_resonant(params)
    om = _drive(params, omega, cavity=True)
    gt = params.gamma_tot
    da = params.delta_a
    c = cooperativity(params)
    coupling = params.g**2 / (4.0 * params.kappa)
    d_plus = gt * (1.0 + c / 4.0) + 1j * (da + kv)
    d_minus = gt * (1.0 + c / 4.0) + 1j * (da - kv)
    bracket = 1.0 + coupling * (1.0 / d_plus + 1.0 / d_minus)
    b_plus = -1j * om / (2.0 * d_plus) / bracket
    b_minus = -1j * om / (2.0 * d_minus) / bracket
    d1 = gt * (1.0 + c / 4.0) + 1j * da
    d3 = gt * (1.0 + 3.0 * c / 4.0) + 1j * da
    ok = da != 0 and gt * c / (4.0 * abs(da)) < 1.0
    return FloquetSolution(b_minus=b_minus, b_plus=b_plus,
                           b0=-1j * om / (2.0 * d3),
                           b1=-om / (2.0 * d1 * d3),
                           regime_i_ok=ok)


def toeplitz_lambda(params: Params, n_g: float = 1.0) -> complex:
    """In-disk root of the tridiagonal harmonic-coupling recursion.

    The quadratic c*lam^2 + a*lam + c = 0 with a = gamma_tot + i*delta_a
    + g^2/(2*kappa) and c = g^2/(4*kappa) has reciprocal roots; the one
    with |lam| < 1 generates the geometric decay of the harmonic ladder.
    `n_g` rescales the coupling for a partially depleted ground state.
    """
    if params.g <= 0 or params.kappa <= 0:
        raise ValueError("toeplitz_lambda: needs g > 0 and kappa > 0")
    gsq = params.g**2 * n_g
    a = (params.gamma_tot + 1j * params.delta_a) + gsq / (2.0 * params.kappa)
    c = gsq / (4.0 * params.kappa)
    disc = cmath.sqrt(a * a - 4.0 * c * c)
    # evaluate the large root without cancellation; the two roots multiply
    # to exactly 1, so the in-disk root is its reciprocal
    if abs(a + disc) >= abs(a - disc):
        big = -(a + disc) / (2.0 * c)
    else:
        big = -(a - disc) / (2.0 * c)
    lam = 1.0 / big
    if abs(abs(lam) - 1.0) < 1e-14:
        raise ValueError("toeplitz_lambda: degenerate root on the unit circle "
                         "(requires gamma_tot = delta_a = 0)")
    return lam


def default_truncation_order(params: Params, tol: float = 1e-12,
                             cap: int = 401) -> int:
    """Smallest odd harmonic order whose ladder coefficient drops below tol."""
    lam = toeplitz_lambda(params)
    mod = abs(lam)
    if mod == 0.0:
        return 1
    # |lam|^((order+1)/2) < tol
    import math
    half = math.log(tol) / math.log(mod)
    order = 2 * int(math.ceil(half)) - 1
    order = max(order, 1)
    return min(order if order % 2 == 1 else order + 1, cap)


def floquet_cavity_infinite(params: Params, order: int | None = None,
                            omega: complex | None = None) -> FloquetSolution:
    """All-order harmonic coefficients from the Toeplitz closed form.

    Returns the velocity-independent ladder b0, b0*lam, b0*lam^2, ... up
    to the requested odd order, and the first-order linear response b1.
    """
    _require_resonant(params)
    if order is None:
        order = default_truncation_order(params)
    if order < 1 or order % 2 == 0:
        raise ValueError("floquet_cavity_infinite: order must be a positive odd integer")
    om = _drive(params, omega, cavity=True)
    lam = toeplitz_lambda(params)
    t = 4.0 * params.kappa / params.g**2
    n_orders = (order + 1) // 2
    ladder = tuple((-1j * om / 2.0) * t * lam ** (n + 1) / (lam - 1.0)
                   for n in range(n_orders))
    # Sign fixed against the dense solve: d b_{+1}/d(kv) equals +i times
    # the A^{-1} D A^{-1} matrix element, giving an overall +Omega/2.
    b1 = (om / 2.0) * t**2 * lam**2 * (lam**2 + 1.0) / (lam**2 - 1.0) ** 3
    b0 = ladder[0]
    return FloquetSolution(b_minus=b0, b_plus=b0, b0=b0, b1=b1,
                           higher=ladder[1:], lam=lam)


def floquet_many_sherman_morrison(params: Params, kv_list,
                                  omega: complex | None = None
                                  ) -> list[FloquetSolution]:
    """First-order sidebands for every emitter of an ensemble.

    Each emitter keeps its individual Lorentzian of width
    gamma_tot*(1 + C/4) while a single shared bracket sums the response
    of all emitters and both sidebands; expanding in the Doppler shifts
    collapses the bracket into the collectively broadened width
    gamma_tot*(1 + (2N+1)C/4).
    """
    _require_resonant(params)
    kv = np.asarray(kv_list, dtype=float)
    om = _drive(params, omega, cavity=True)
    gt = params.gamma_tot
    da = params.delta_a
    c = cooperativity(params)
    coupling = params.g**2 / (4.0 * params.kappa)
    width = gt * (1.0 + c / 4.0)
    d_plus = width + 1j * (da + kv)
    d_minus = width + 1j * (da - kv)
    bracket = 1.0 + coupling * np.sum(1.0 / d_plus + 1.0 / d_minus)
    nn = kv.size
    d_coll = gt * (1.0 + c * (2.0 * nn + 1.0) / 4.0) + 1j * da
    d_ind = width + 1j * da
    b0 = -1j * om / (2.0 * d_coll)
    b1 = -om / (2.0 * d_ind * d_coll)
    out = []
    for j in range(nn):
        out.append(FloquetSolution(
            b_minus=-1j * om / (2.0 * d_minus[j]) / bracket,
            b_plus=-1j * om / (2.0 * d_plus[j]) / bracket,
            b0=b0, b1=b1))
    return out


def cavity_amplitude_adiabatic(params: Params, solutions,
                               ) -> complex:
    """Spatially averaged cavity amplitude once the field follows the emitters."""
    base = 0.0 + 0.0j
    if params.kappa > 0:
        base = -params.eta / (params.kappa + 1j * params.delta_c)
    total = sum((sol.b0 for sol in solutions), 0.0 + 0.0j)
    if params.g == 0.0 or params.kappa <= 0:
        return base
    return base - 1j * params.g / params.kappa * total


# --- dense oracles ---------------------------------------------------------
#
# These solve the defining linear systems by partial-pivoted LU and are the
# independent check on every closed form above.

def tridiagonal_system(params: Params, kv: float, order: int,
                       omega: complex | None = None):
    """Assemble the truncated harmonic system (A + i*kv*D) b = rhs.

    Rows/columns follow the odd harmonics -order, ..., -1, +1, ..., +order.
    Returns (matrix, rhs, harmonics).
    """
    om = _drive(params, omega, cavity=True)
    harm = np.arange(-order, order + 1, 2)
    n = harm.size
    a = (params.gamma_tot + 1j * params.delta_a) + params.g**2 / (2.0 * params.kappa)
    c = params.g**2 / (4.0 * params.kappa)
    mat = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(mat, a)
    idx = np.arange(n - 1)
    mat[idx, idx + 1] = c
    mat[idx + 1, idx] = c
    mat += 1j * kv * np.diag(harm.astype(float))
    rhs = np.zeros(n, dtype=complex)
    rhs[harm == 1] = -1j * om / 2.0
    rhs[harm == -1] = -1j * om / 2.0
    return mat, rhs, harm


def dense_cavity_solve(params: Params, kv: float, order: int,
                       omega: complex | None = None):
    """LU solve of the truncated harmonic system; returns (harmonics, b)."""
    mat, rhs, harm = tridiagonal_system(params, kv, order, omega)
    return harm, np.linalg.solve(mat, rhs)


def residual_cavity_2x2(params: Params, kv: float, sol: FloquetSolution,
                        omega: complex | None = None) -> float:
    """Relative residual of a sideband pair in the two-sideband system."""
    mat, rhs, _ = tridiagonal_system(params, kv, 1, omega)
    b = np.array([sol.b_minus, sol.b_plus])
    return float(np.linalg.norm(mat @ b - rhs) / np.linalg.norm(rhs))


def many_emitter_system(params: Params, kv_list, omega: complex | None = None):
    """Assemble the scaled 2N x 2N ensemble system with unit off-diagonals.

    Ordering is (b_{1,-}, ..., b_{N,-}, b_{1,+}, ..., b_{N,+}); the
    diagonal carries [gamma_tot + i(delta_a -+ kv_j)]*4*kappa/g^2 + 2 and
    every off-diagonal entry is 1.
    """
    kv = np.asarray(kv_list, dtype=float)
    om = _drive(params, omega, cavity=True)
    scale = 4.0 * params.kappa / params.g**2
    a_minus = (params.gamma_tot + 1j * (params.delta_a - kv)) * scale + 2.0
    a_plus = (params.gamma_tot + 1j * (params.delta_a + kv)) * scale + 2.0
    diag = np.concatenate([a_minus, a_plus])
    n = diag.size
    mat = np.ones((n, n), dtype=complex)
    np.fill_diagonal(mat, diag)
    rhs = np.full(n, -2j * params.kappa * om / params.g**2, dtype=complex)
    return mat, rhs


def dense_many_solve(params: Params, kv_list, omega: complex | None = None):
    """LU solve of the ensemble system; returns (b_minus[j], b_plus[j])."""
    mat, rhs = many_emitter_system(params, kv_list, omega)
    b = np.linalg.solve(mat, rhs)
    n = b.size // 2
    return b[:n], b[n:]


def residual_many(params: Params, kv_list, sols,
                  omega: complex | None = None) -> float:
    """Relative residual of Sherman-Morrison sidebands in the full system."""
    mat, rhs = many_emitter_system(params, kv_list, omega)
    b = np.concatenate([[s.b_minus for s in sols], [s.b_plus for s in sols]])
    return float(np.linalg.norm(mat @ b - rhs) / np.linalg.norm(rhs))


def lambda_residual(params: Params) -> float:
    """Quadratic residual |c*lam^2 + a*lam + c| / |a| of the Toeplitz root."""
    lam = toeplitz_lambda(params)
    a = (params.gamma_tot + 1j * params.delta_a) + params.g**2 / (2.0 * params.kappa)
    c = params.g**2 / (4.0 * params.kappa)
    return float(abs(c * lam * lam + a * lam + c) / abs(a))
