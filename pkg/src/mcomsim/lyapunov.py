"""Steady-state covariance matrix from the Lyapunov equation A V + V A^T = -D."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .dynamics import stability
from .errors import Diverged, SingularSolve, UnstableSystem

RESIDUAL_REL = 1e-10
DERIVATIVE_TOL = 1e-12


def symplectic_form(n_modes: int = 4) -> np.ndarray:
    """Block-diagonal [[0, 1], [-1, 0]] per mode."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def lyapunov_residual(a: np.ndarray, d: np.ndarray, v: np.ndarray) -> float:
    return float(np.linalg.norm(a @ v + v @ a.T + d))


def solve_lyapunov(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Dense solve via the Kronecker identity (I(x)A + A(x)I) vec(V) = -vec(D).

    At 8x8 the 64x64 linear system is exact and cheap.  The result is
    symmetrized to remove machine-precision asymmetry.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    report = stability(a)
    if not report.stable:
        raise UnstableSystem(
            f"drift matrix is not Hurwitz stable (max Re lambda = {report.max_real_part:.6e})"
        )
    n = a.shape[0]
    eye = np.eye(n)
    kron = np.kron(eye, a) + np.kron(a, eye)
    try:
        vec = np.linalg.solve(kron, -d.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularSolve(f"Lyapunov solve singular: {exc}") from exc
    v = vec.reshape(n, n)
    v = 0.5 * (v + v.T)
    residual = lyapunov_residual(a, d, v)
    if residual > RESIDUAL_REL * max(np.linalg.norm(d), np.finfo(float).tiny):
        raise SingularSolve(
            f"Lyapunov residual {residual:.3e} exceeds tolerance (marginal stability?)"
        )
    return v


def integrate_covariance(
    a: np.ndarray,
    d: np.ndarray,
    t_end: float = 1e7,
    dt: float = 0.01,
    v0: np.ndarray | None = None,
    tol: float = DERIVATIVE_TOL,
) -> np.ndarray:
    """Oracle: propagate dV/dt = A V + V A^T + D to t_end from V(0).

    One step of length dt is represented exactly through the block matrix
    exponential exp(dt [[A, D], [0, -A^T]]), giving V -> F V F^T + W; the
    requested number of steps is then applied by binary composition, so
    deep times cost log2(t_end/dt) matrix products.  Stops early once
    ||dV/dt||_F <= tol.  Raises Diverged when V grows without bound
    (unstable drift).
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if dt > 0.01:
        raise ValueError(f"dt={dt} does not resolve the fast dynamics (need dt <= 0.01)")
    n = a.shape[0]
    if v0 is None:
        v = 0.5 * np.eye(n)
    else:
        v = np.array(v0, dtype=float)
    n_steps = int(round(t_end / dt))
    if n_steps <= 0:
        return v

    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = a
    block[:n, n:] = d
    block[n:, n:] = -a.T
    prop = expm(block * dt)
    f = prop[:n, :n]
    w = prop[:n, n:] @ f.T
    w = 0.5 * (w + w.T)

    remaining = n_steps
    while remaining > 0:
        if remaining & 1:
            v = f @ v @ f.T + w
            v = 0.5 * (v + v.T)
            if not np.all(np.isfinite(v)) or np.linalg.norm(v) > 1e12:
                raise Diverged("covariance integration diverged (unstable drift matrix)")
            if lyapunov_residual(a, d, v) <= tol:
                return v
        remaining >>= 1
        if remaining:
            w = f @ w @ f.T + w
            w = 0.5 * (w + w.T)
            f = f @ f
            if not np.all(np.isfinite(w)) or np.linalg.norm(w) > 1e14:
                raise Diverged("covariance integration diverged (unstable drift matrix)")
    return v


def uncertainty_defect(v: np.ndarray) -> float:
    """Smallest eigenvalue of V + (i/2) Omega; >= 0 for a physical Gaussian state."""
    n_modes = v.shape[0] // 2
    herm = v + 0.5j * symplectic_form(n_modes)
    return float(np.linalg.eigvalsh(herm).min())


def is_physical(v: np.ndarray, tol: float = 1e-9) -> bool:
    return uncertainty_defect(v) >= -tol
