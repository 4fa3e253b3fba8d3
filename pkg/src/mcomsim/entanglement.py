"""Two-mode reductions of the covariance matrix and logarithmic negativity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPhysicalState
from .lyapunov import symplectic_form

MODE_LABELS = ("cavity_a", "cavity_c", "vib_1", "vib_2")
MODE_INDEX = {label: i for i, label in enumerate(MODE_LABELS)}

# tiny negative discriminants are floating-point noise; anything below
# this is a genuinely unphysical input and is raised, not masked
CLAMP = 1e-9


@dataclass(frozen=True)
class ModePair:
    first: str
    second: str

    def __post_init__(self):
        for label in (self.first, self.second):
            if label not in MODE_INDEX:
                raise ValueError(f"unknown mode label {label!r}; expected one of {MODE_LABELS}")
        if self.first == self.second:
            raise ValueError("mode pair must name two distinct modes")


@dataclass(frozen=True)
class PairCovariance:
    """Partition of a two-mode covariance matrix into 2x2 blocks."""

    phi_1: np.ndarray
    phi_2: np.ndarray
    phi_3: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.block([[self.phi_1, self.phi_3], [self.phi_3.T, self.phi_2]])


def extract_pair(v: np.ndarray, pair: ModePair) -> PairCovariance:
    """Rows/columns of the two selected modes, in pair order."""
    i = MODE_INDEX[pair.first]
    j = MODE_INDEX[pair.second]
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    sub = np.asarray(v, dtype=float)[np.ix_(idx, idx)]
    return PairCovariance(
        phi_1=sub[:2, :2].copy(),
        phi_2=sub[2:, 2:].copy(),
        phi_3=sub[:2, 2:].copy(),
    )


def log_negativity(pc: PairCovariance) -> float:
    """Closed-form logarithmic negativity of a two-mode Gaussian state.

    With Sigma = det(phi_1) + det(phi_2) - 2 det(phi_3), the smallest
    symplectic eigenvalue of the partially transposed state is
    zeta = sqrt((Sigma - sqrt(Sigma^2 - 4 det V)) / 2) and the
    entanglement is max(0, -ln 2 zeta).
    """
    det_1 = float(np.linalg.det(pc.phi_1))
    det_2 = float(np.linalg.det(pc.phi_2))
    det_3 = float(np.linalg.det(pc.phi_3))
    det_v = float(np.linalg.det(pc.matrix()))
    sigma = det_1 + det_2 - 2.0 * det_3
    disc = sigma * sigma - 4.0 * det_v
    if disc < -CLAMP:
        raise NonPhysicalState(f"discriminant {disc:.3e} below -{CLAMP:.0e}; input is unphysical")
    if disc < 0.0:
        disc = 0.0
    # rationalized small root: avoids the sigma - sqrt(disc) cancellation
    # that loses digits for strongly squeezed states
    denom = sigma + math.sqrt(disc)
    if denom <= 0.0 or det_v <= 0.0:
        raise NonPhysicalState(
            f"partially transposed symplectic eigenvalue is not real "
            f"(Sigma = {sigma:.3e}, det V = {det_v:.3e})"
        )
    zeta_sq = 2.0 * det_v / denom
    return max(0.0, -0.5 * math.log(4.0 * zeta_sq))


def log_negativity_ppt_oracle(pc: PairCovariance) -> float:
    """Oracle route: partial transposition then symplectic spectrum.

    Flips the sign of the second mode's momentum and takes the minimum
    modulus of the eigenvalues of i Omega V~.
    """
    v = pc.matrix()
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    v_pt = flip @ v @ flip
    eigs = np.linalg.eigvals(1j * symplectic_form(2) @ v_pt)
    nu = np.abs(eigs).min()
    if nu <= 0.0:
        raise NonPhysicalState("partially transposed covariance has a zero symplectic eigenvalue")
    return max(0.0, -math.log(2.0 * nu))
