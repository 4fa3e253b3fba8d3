import numpy as np
import pytest
from scipy.linalg import expm

from mcomsim import DEFAULTS, symplectic_form

from . import acceptance_report


@pytest.fixture
def defaults():
    return DEFAULTS


def random_stable_drift(rng, n=8, margin=0.05):
    """Random Hurwitz-stable matrix: shift the spectrum left of -margin."""
    a = rng.normal(size=(n, n))
    shift = np.linalg.eigvals(a).real.max() + margin
    return a - shift * np.eye(n)


def random_lindblad_drift(rng, n_modes=4):
    """Drift of a genuine damped-Hamiltonian model, Omega H - diag(rates).

    Paired with local noise diag(rates * (2 n + 1)) the steady state must
    satisfy the uncertainty relation.  Indefinite H can out-run the
    damping, so redraw until the generator is Hurwitz stable.
    """
    from mcomsim.dynamics import stability

    n = 2 * n_modes
    for _ in range(200):
        h = rng.normal(size=(n, n))
        h = 0.5 * (h + h.T)
        # positive-definite H keeps the symplectic part purely oscillatory
        h += (abs(np.linalg.eigvalsh(h).min()) + rng.uniform(0.1, 1.0)) * np.eye(n)
        rates = rng.uniform(0.05, 1.0, size=n_modes)
        damping = np.diag(np.repeat(rates, 2))
        a = symplectic_form(n_modes) @ h - damping
        if stability(a).stable:
            return a, rates
    raise RuntimeError("no stable damped-Hamiltonian draw in 200 attempts")


def random_physical_pair_cm(rng, nu_max=3.0, squeeze=1.0):
    """Two-mode covariance matrix S diag(nu) S^T with nu >= 1/2: physical."""
    h = rng.normal(scale=squeeze / 2.0, size=(4, 4))
    h = 0.5 * (h + h.T)
    s = expm(symplectic_form(2) @ h)
    nu = rng.uniform(0.5, nu_max, size=2)
    diag = np.diag([nu[0], nu[0], nu[1], nu[1]])
    v = s @ diag @ s.T
    return 0.5 * (v + v.T)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.LINES:
            terminalreporter.write_line(line)
