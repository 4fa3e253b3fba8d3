"""Linearized fluctuation dynamics: drift matrix, diffusion matrix, stability.

Quadrature ordering is (x_a, y_a, x_c, y_c, q_1, p_1, q_2, p_2) with the
1/2-vacuum convention x = (a + a^dag)/sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EigenvalueFailure
from .meanfield import OMEGA_M, SteadyState
from .params import SystemParams

# margin below zero required of every eigenvalue real part; points inside
# the margin are classified unstable because the covariance diverges at
# marginal stability
EPS_STAB = 1e-12

N_QUAD = 8


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_part: float
    eigenvalues: np.ndarray


def build_drift(ss: SteadyState, params: SystemParams) -> np.ndarray:
    """8x8 drift matrix of the quadrature fluctuations."""
    lam = params.lambda_opa
    cos_t = math.cos(params.theta)
    sin_t = math.sin(params.theta)
    ka, kc = params.kappa_a, params.kappa_c
    da = params.delta_a
    dct = ss.delta_c_eff
    j1, j2 = params.j_1, params.j_2
    g1, g2 = ss.g_cap_1, ss.g_cap_2
    gm1, gm2 = params.gamma_1, params.gamma_2
    w = OMEGA_M
    return np.array(
        [
            [2 * lam * cos_t - ka, 2 * lam * sin_t + da, 0, j1, 0, 0, 0, 0],
            [2 * lam * sin_t - da, -(2 * lam * cos_t + ka), -j1, 0, 0, 0, 0, 0],
            [0, j2, -kc, dct, 0, 0, 0, 0],
            [-j2, 0, -dct, -kc, 2 * g1, 0, 2 * g2, 0],
            [0, 0, 0, 0, -gm1, w, 0, 0],
            [0, 0, 2 * g1, 0, -w, -gm1, 0, 0],
            [0, 0, 0, 0, 0, 0, -gm2, w],
            [0, 0, 2 * g2, 0, 0, 0, -w, -gm2],
        ],
        dtype=float,
    )


def build_diffusion(params: SystemParams, n_th: float) -> np.ndarray:
    """Diagonal noise matrix; vibrational entries carry the thermal factor."""
    vib_1 = params.gamma_1 * (2.0 * n_th + 1.0)
    vib_2 = params.gamma_2 * (2.0 * n_th + 1.0)
    return np.diag(
        [
            params.kappa_a,
            params.kappa_a,
            params.kappa_c,
            params.kappa_c,
            vib_1,
            vib_1,
            vib_2,
            vib_2,
        ]
    )


def stability(a: np.ndarray, eps: float = EPS_STAB) -> StabilityReport:
    """Eigenvalue stability verdict: stable iff every real part < -eps."""
    try:
        eigenvalues = np.linalg.eigvals(np.asarray(a, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise EigenvalueFailure(f"eigensolver failed: {exc}") from exc
    max_real_part = float(eigenvalues.real.max())
    return StabilityReport(
        stable=bool(max_real_part < -eps),
        max_real_part=max_real_part,
        eigenvalues=eigenvalues,
    )
