"""Classical mean-field steady state of the driven two-cavity system.

``solve_mean_field`` finds the self-consistent fixed point of the
steady-state relations; ``integrate_classical`` integrates the
deterministic nonlinear equations of motion from vacuum and serves as an
independent oracle for the solver.

Two treatments of the parametric-amplifier term are available.  In
``mode="paper"`` the conjugate amplitude in the cavity-1 relation is
identified with the amplitude itself, so

    alpha_a = (E_a - i J_1 alpha_c) / ((i Delta_a + kappa_a) - 2 Lambda e^{i theta}),

which is the closed form the downstream figure reproductions are built
on.  ``mode="exact"`` keeps the conjugate coupling and solves the linear
system in (alpha_a, conj(alpha_a), alpha_c, conj(alpha_c)) instead.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import Diverged, NonConvergence
from .params import SystemParams, collective_couplings, validate

OMEGA_M = 1.0
DAMPING = 0.5
MAX_ITER = 10_000
TOL = 1e-10

# |amplitude|^2 above this is treated as a runaway trajectory
OVERFLOW_GUARD = 1e16


@dataclass(frozen=True)
class SteadyState:
    """Mean-field amplitudes and the linearized couplings derived from them.

    delta_c_eff is the effective cavity-2 detuning (bare detuning shifted
    by the static vibrational displacements); g_cap_1/2 are the
    field-enhanced couplings g_k |alpha_c| consumed by the drift matrix.
    """

    alpha_a: complex
    alpha_c: complex
    beta_1: complex
    beta_2: complex
    delta_c_eff: float
    g_cap_1: float
    g_cap_2: float
    iterations: int = 0
    residual: float = 0.0


def _beta(g_k: float, gamma_k: float, s: float) -> complex:
    return -1j * g_k * s / (1j * OMEGA_M + gamma_k)


def _detuning_shift_coef(g_1: float, g_2: float, gamma_1: float, gamma_2: float) -> float:
    # delta_c_eff = delta_c - sum_k 2 g_k Re[beta_k]; Re[beta_k] < 0, so the
    # shift adds 2 s sum_k g_k^2 omega / (gamma_k^2 + omega^2)
    return 2.0 * (
        g_1 * g_1 * OMEGA_M / (gamma_1 * gamma_1 + OMEGA_M * OMEGA_M)
        + g_2 * g_2 * OMEGA_M / (gamma_2 * gamma_2 + OMEGA_M * OMEGA_M)
    )


def _solve_linear(params: SystemParams, dct: float, mode: str) -> tuple[complex, complex]:
    """Cavity amplitudes for a frozen effective detuning."""
    opa = 2.0 * params.lambda_opa * cmath.exp(1j * params.theta)
    if mode == "paper":
        m = np.array(
            [
                [(1j * params.delta_a + params.kappa_a) - opa, 1j * params.j_1],
                [1j * params.j_2, 1j * dct + params.kappa_c],
            ],
            dtype=complex,
        )
        rhs = np.array([params.drive_a, params.drive_c], dtype=complex)
        alpha_a, alpha_c = np.linalg.solve(m, rhs)
        return alpha_a, alpha_c
    if mode == "exact":
        da, ka = params.delta_a, params.kappa_a
        kc = params.kappa_c
        m = np.array(
            [
                [1j * da + ka, -opa, 1j * params.j_1, 0.0],
                [-opa.conjugate(), -1j * da + ka, 0.0, -1j * params.j_1],
                [1j * params.j_2, 0.0, 1j * dct + kc, 0.0],
                [0.0, -1j * params.j_2, 0.0, -1j * dct + kc],
            ],
            dtype=complex,
        )
        rhs = np.array([params.drive_a, params.drive_a, params.drive_c, params.drive_c], dtype=complex)
        sol = np.linalg.solve(m, rhs)
        return sol[0], sol[2]
    raise ValueError(f"unknown mean-field mode {mode!r}")


def _relative_residual(params: SystemParams, mode: str, alpha_a, alpha_c, beta_1, beta_2, dct) -> float:
    g_1, g_2 = collective_couplings(params)
    opa = 2.0 * params.lambda_opa * cmath.exp(1j * params.theta)
    s = abs(alpha_c) ** 2
    if mode == "paper":
        e_a = ((1j * params.delta_a + params.kappa_a) - opa) * alpha_a + 1j * params.j_1 * alpha_c - params.drive_a
    else:
        e_a = (
            (1j * params.delta_a + params.kappa_a) * alpha_a
            - opa * alpha_a.conjugate()
            + 1j * params.j_1 * alpha_c
            - params.drive_a
        )
    e_c = (1j * dct + params.kappa_c) * alpha_c + 1j * params.j_2 * alpha_a - params.drive_c
    e_1 = (1j * OMEGA_M + params.gamma_1) * beta_1 + 1j * g_1 * s
    e_2 = (1j * OMEGA_M + params.gamma_2) * beta_2 + 1j * g_2 * s
    scale_a = 1.0 + abs(params.drive_a)
    scale_c = 1.0 + abs(params.drive_c)
    scale_b = 1.0 + s
    return max(abs(e_a) / scale_a, abs(e_c) / scale_c, abs(e_1) / scale_b, abs(e_2) / scale_b)


def _assemble(params, mode, alpha_a, alpha_c, dct, iterations) -> SteadyState:
    g_1, g_2 = collective_couplings(params)
    s = abs(alpha_c) ** 2
    beta_1 = _beta(g_1, params.gamma_1, s)
    beta_2 = _beta(g_2, params.gamma_2, s)
    residual = _relative_residual(params, mode, alpha_a, alpha_c, beta_1, beta_2, dct)
    mag = abs(alpha_c)
    return SteadyState(
        alpha_a=complex(alpha_a),
        alpha_c=complex(alpha_c),
        beta_1=beta_1,
        beta_2=beta_2,
        delta_c_eff=float(dct),
        g_cap_1=g_1 * mag,
        g_cap_2=g_2 * mag,
        iterations=iterations,
        residual=residual,
    )


def solve_mean_field(
    params: SystemParams,
    mode: str = "paper",
    tol: float = TOL,
    max_iter: int = MAX_ITER,
) -> SteadyState:
    """Self-consistent steady state via damped fixed-point iteration.

    The only nonlinear unknown is s = |alpha_c|^2, which feeds the
    effective detuning; the cavity pair is re-solved exactly at each
    iterate and the update is damped by 0.5.  A stalling period-2
    residual pattern is reported as NonConvergence (possible
    multistability) rather than silently picking a branch.
    """
    validate(params)
    g_1, g_2 = collective_couplings(params)

    if params.delta_c_eff is not None:
        alpha_a, alpha_c = _solve_linear(params, params.delta_c_eff, mode)
        state = _assemble(params, mode, alpha_a, alpha_c, params.delta_c_eff, 1)
        if state.residual > tol:
            raise NonConvergence(
                f"pinned-detuning solve left residual {state.residual:.3e}",
                residual=state.residual,
                iterations=1,
            )
        return state

    shift = _detuning_shift_coef(g_1, g_2, params.gamma_1, params.gamma_2)
    s = 0.0
    history = [s]
    stall = 0
    for iteration in range(1, max_iter + 1):
        dct = params.delta_c + shift * s
        alpha_a, alpha_c = _solve_linear(params, dct, mode)
        s_new = abs(alpha_c) ** 2
        step = abs(s_new - s)
        if not math.isfinite(s_new):
            raise NonConvergence(
                "mean-field iteration produced a non-finite amplitude",
                residual=math.inf,
                iterations=iteration,
            )
        if step <= 0.1 * tol * (1.0 + s_new):
            dct = params.delta_c + shift * s_new
            alpha_a, alpha_c = _solve_linear(params, dct, mode)
            state = _assemble(params, mode, alpha_a, alpha_c, dct, iteration)
            if state.residual > tol:
                raise NonConvergence(
                    f"mean-field residual {state.residual:.3e} exceeds {tol:.1e}",
                    residual=state.residual,
                    iterations=iteration,
                )
            return state
        s = s + DAMPING * (s_new - s)
        # period-2 pattern: the damped iterate returns to where it was two
        # steps ago while the per-step residual has stopped shrinking
        if (
            len(history) >= 2
            and abs(s - history[-2]) <= 1e-12 * (1.0 + abs(s))
            and abs(s - history[-1]) > tol * (1.0 + abs(s))
        ):
            stall += 1
            if stall >= 4:
                raise NonConvergence(
                    "mean-field iteration oscillates with period 2 "
                    "(possible multistability of the classical fixed point)",
                    residual=abs(s - history[-1]) / (1.0 + abs(s)),
                    iterations=iteration,
                )
        else:
            stall = 0
        history.append(s)
        if len(history) > 3:
            history.pop(0)
    raise NonConvergence(
        f"mean-field iteration did not converge in {max_iter} iterations",
        residual=step / (1.0 + s_new),
        iterations=max_iter,
    )


@njit(cache=True)
def _rk4_classical(y0, n_steps, dt, ka, kc, da, dc, g1, g2, gm1, gm2, j1, j2, opa, ea, ec, conj_opa):
    """Fixed-step RK4 for the four complex mean-field amplitudes."""
    a, c, b1, b2 = y0[0], y0[1], y0[2], y0[3]

    def deriv(a, c, b1, b2):
        if conj_opa:
            opa_term = opa * np.conj(a)
        else:
            opa_term = opa * a
        da_dt = -(1j * da + ka) * a - 1j * j1 * c + opa_term + ea
        coupling = 2.0 * (g1 * b1.real + g2 * b2.real)
        dc_dt = -(1j * dc + kc) * c + 1j * c * coupling - 1j * j2 * a + ec
        cc = c.real * c.real + c.imag * c.imag
        db1_dt = -(1j * OMEGA_M + gm1) * b1 - 1j * g1 * cc
        db2_dt = -(1j * OMEGA_M + gm2) * b2 - 1j * g2 * cc
        return da_dt, dc_dt, db1_dt, db2_dt

    for _ in range(n_steps):
        k1 = deriv(a, c, b1, b2)
        k2 = deriv(a + 0.5 * dt * k1[0], c + 0.5 * dt * k1[1], b1 + 0.5 * dt * k1[2], b2 + 0.5 * dt * k1[3])
        k3 = deriv(a + 0.5 * dt * k2[0], c + 0.5 * dt * k2[1], b1 + 0.5 * dt * k2[2], b2 + 0.5 * dt * k2[3])
        k4 = deriv(a + dt * k3[0], c + dt * k3[1], b1 + dt * k3[2], b2 + dt * k3[3])
        a = a + (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        c = c + (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        b1 = b1 + (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        b2 = b2 + (dt / 6.0) * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        if (a.real * a.real + a.imag * a.imag) > OVERFLOW_GUARD or (
            c.real * c.real + c.imag * c.imag
        ) > OVERFLOW_GUARD:
            return a, c, b1, b2, True
    return a, c, b1, b2, False


def integrate_classical(
    params: SystemParams,
    t_end: float = 2.0e5,
    dt: float = 0.005,
    mode: str = "exact",
    settle_tol: float = 1e-3,
) -> SteadyState:
    """Oracle: integrate the deterministic equations of motion from vacuum.

    Defaults to the genuine conjugate parametric coupling
    (``mode="exact"``); pass ``mode="paper"`` to cross-check the closed
    forms used by ``solve_mean_field``.  Raises Diverged when the
    trajectory exceeds the overflow guard, or when it stays bounded but
    has not settled onto the fixed point by ``t_end`` (a saturated
    instability); both signal classically unstable dynamics.
    """
    validate(params)
    if dt > 0.01 / OMEGA_M:
        raise ValueError(f"dt={dt} does not resolve the vibrational period (need dt <= 0.01)")
    if mode not in ("paper", "exact"):
        raise ValueError(f"unknown mean-field mode {mode!r}")
    g_1, g_2 = collective_couplings(params)
    n_steps = int(round(t_end / dt))
    y0 = np.zeros(4, dtype=np.complex128)
    opa = 2.0 * params.lambda_opa * cmath.exp(1j * params.theta)
    a, c, b1, b2, blew_up = _rk4_classical(
        y0,
        n_steps,
        float(dt),
        params.kappa_a,
        params.kappa_c,
        params.delta_a,
        params.delta_c,
        g_1,
        g_2,
        params.gamma_1,
        params.gamma_2,
        params.j_1,
        params.j_2,
        opa,
        complex(params.drive_a),
        complex(params.drive_c),
        mode == "exact",
    )
    if blew_up:
        raise Diverged("classical trajectory exceeded the overflow guard")
    dct = params.delta_c - 2.0 * (g_1 * b1.real + g_2 * b2.real)
    mag = abs(c)
    residual = _relative_residual(params, mode, a, c, b1, b2, dct)
    if residual > settle_tol:
        raise Diverged(
            f"classical trajectory has not settled by t={t_end:g} "
            f"(fixed-point residual {residual:.2e}); dynamics unstable"
        )
    return SteadyState(
        alpha_a=complex(a),
        alpha_c=complex(c),
        beta_1=complex(b1),
        beta_2=complex(b2),
        delta_c_eff=float(dct),
        g_cap_1=g_1 * mag,
        g_cap_2=g_2 * mag,
        iterations=n_steps,
        residual=residual,
    )
