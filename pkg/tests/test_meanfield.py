import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcomsim import (
    DEFAULTS,
    Diverged,
    NonConvergence,
    apply_overrides,
    integrate_classical,
    solve_mean_field,
)
from mcomsim.params import collective_couplings

# oracle-friendly operating point: same physics as the published defaults but
# with vibrational damping large enough that the classical flow is attracting
ORACLE_POINT = apply_overrides(DEFAULTS, {"gamma_1": 0.02, "gamma_2": 0.02})


def linear_pair_solution(p):
    """Closed form for g_m = 0, lambda = 0: two coupled linear cavities."""
    den_a = 1j * p.delta_a + p.kappa_a
    den_c = 1j * p.delta_c + p.kappa_c
    det = den_a * den_c + p.j_1 * p.j_2
    alpha_a = (p.drive_a * den_c - 1j * p.j_1 * p.drive_c) / det
    alpha_c = (p.drive_c * den_a - 1j * p.j_2 * p.drive_a) / det
    return alpha_a, alpha_c


def test_undriven_system_is_dark():
    p = apply_overrides(DEFAULTS, {"drive": 0.0})
    ss = solve_mean_field(p)
    assert ss.alpha_a == 0 and ss.alpha_c == 0
    assert ss.beta_1 == 0 and ss.beta_2 == 0
    assert ss.delta_c_eff == p.delta_c
    assert ss.g_cap_1 == 0.0 and ss.g_cap_2 == 0.0


@pytest.mark.parametrize("mode", ["paper", "exact"])
def test_linear_limit_matches_closed_form(mode):
    p = apply_overrides(DEFAULTS, {"g_m": 0.0, "lambda_opa": 0.0})
    ss = solve_mean_field(p, mode=mode)
    alpha_a, alpha_c = linear_pair_solution(p)
    assert abs(ss.alpha_a - alpha_a) < 1e-12 * (1 + abs(alpha_a))
    assert abs(ss.alpha_c - alpha_c) < 1e-12 * (1 + abs(alpha_c))
    assert ss.delta_c_eff == p.delta_c


@pytest.mark.parametrize("mode", ["paper", "exact"])
def test_fixed_point_relations_hold(defaults, mode):
    ss = solve_mean_field(defaults, mode=mode)
    g_1, g_2 = collective_couplings(defaults)
    s = abs(ss.alpha_c) ** 2
    beta_1 = -1j * g_1 * s / (1j + defaults.gamma_1)
    beta_2 = -1j * g_2 * s / (1j + defaults.gamma_2)
    assert abs(ss.beta_1 - beta_1) < 1e-10 * (1 + abs(beta_1))
    assert abs(ss.beta_2 - beta_2) < 1e-10 * (1 + abs(beta_2))
    shift = -2 * (g_1 * ss.beta_1.real + g_2 * ss.beta_2.real)
    assert ss.delta_c_eff == pytest.approx(defaults.delta_c + shift, rel=1e-12)
    assert ss.g_cap_1 == pytest.approx(g_1 * abs(ss.alpha_c), rel=1e-14)
    assert ss.g_cap_2 == pytest.approx(g_2 * abs(ss.alpha_c), rel=1e-14)
    assert ss.residual <= 1e-10
    assert ss.iterations > 0


def test_betas_have_nonpositive_real_part(defaults):
    ss = solve_mean_field(defaults)
    assert ss.beta_1.real <= 0.0
    assert ss.beta_2.real <= 0.0


@settings(max_examples=30, deadline=None)
@given(
    drive=st.floats(0.0, 30.0),
    j_1=st.floats(0.0, 1.0),
    j_2=st.floats(0.0, 1.0),
    lam=st.floats(0.0, 0.35),
)
def test_beta_sign_property(drive, j_1, j_2, lam):
    p = apply_overrides(DEFAULTS, {"drive": drive, "j_1": j_1, "j_2": j_2, "lambda_opa": lam})
    try:
        ss = solve_mean_field(p)
    except NonConvergence:
        return  # multistable or non-contracting point; nothing to assert
    assert ss.beta_1.real <= 1e-15
    assert ss.beta_2.real <= 1e-15
    assert ss.g_cap_1 >= 0.0 and ss.g_cap_2 >= 0.0


def test_gamma_swap_symmetry():
    p = apply_overrides(ORACLE_POINT, {"gamma_1": 0.03, "gamma_2": 0.07, "m_split": 30})
    q = apply_overrides(p, {"gamma_1": 0.07, "gamma_2": 0.03, "m_split": 70})
    a = solve_mean_field(p)
    b = solve_mean_field(q)
    assert abs(a.alpha_a - b.alpha_a) < 1e-9
    assert abs(a.alpha_c - b.alpha_c) < 1e-9
    assert abs(a.beta_1 - b.beta_2) < 1e-9
    assert abs(a.beta_2 - b.beta_1) < 1e-9


def test_pinned_effective_detuning_skips_iteration():
    p = apply_overrides(DEFAULTS, {"delta_c_eff": 1.5})
    ss = solve_mean_field(p)
    assert ss.delta_c_eff == 1.5
    assert ss.iterations == 1
    # cavity relations still hold at the pinned detuning
    opa = 2 * p.lambda_opa * cmath.exp(1j * p.theta)
    lhs = ((1j * p.delta_a + p.kappa_a) - opa) * ss.alpha_a + 1j * p.j_1 * ss.alpha_c
    assert abs(lhs - p.drive_a) < 1e-9


def test_exact_mode_differs_with_opa_but_not_without():
    with_opa = apply_overrides(DEFAULTS, {"lambda_opa": 0.2})
    paper = solve_mean_field(with_opa, mode="paper")
    exact = solve_mean_field(with_opa, mode="exact")
    assert abs(paper.alpha_a - exact.alpha_a) > 1e-6
    without = apply_overrides(DEFAULTS, {"lambda_opa": 0.0})
    paper = solve_mean_field(without, mode="paper")
    exact = solve_mean_field(without, mode="exact")
    assert abs(paper.alpha_a - exact.alpha_a) < 1e-12
    assert abs(paper.alpha_c - exact.alpha_c) < 1e-12


# --- time-integration oracle ------------------------------------------------


def test_oracle_zero_drive_stays_zero():
    p = apply_overrides(DEFAULTS, {"drive": 0.0})
    ss = integrate_classical(p, t_end=50.0, dt=0.005)
    assert ss.alpha_a == 0 and ss.alpha_c == 0 and ss.beta_1 == 0 and ss.beta_2 == 0


@pytest.mark.parametrize("mode", ["paper", "exact"])
def test_oracle_linear_limit(mode):
    p = apply_overrides(DEFAULTS, {"g_m": 0.0, "lambda_opa": 0.0})
    ss = integrate_classical(p, t_end=150.0, dt=0.005, mode=mode)
    alpha_a, alpha_c = linear_pair_solution(p)
    assert abs(ss.alpha_a - alpha_a) < 1e-12 * (1 + abs(alpha_a))
    assert abs(ss.alpha_c - alpha_c) < 1e-12 * (1 + abs(alpha_c))


@pytest.mark.parametrize("mode", ["paper", "exact"])
def test_oracle_matches_solver_where_flow_is_attracting(mode):
    ss = solve_mean_field(ORACLE_POINT, mode=mode)
    oracle = integrate_classical(ORACLE_POINT, t_end=8000.0, dt=0.005, mode=mode)
    assert abs(abs(ss.alpha_a) - abs(oracle.alpha_a)) <= 1e-8 * abs(ss.alpha_a)
    assert abs(abs(ss.alpha_c) - abs(oracle.alpha_c)) <= 1e-8 * abs(ss.alpha_c)
    assert abs(ss.beta_1 - oracle.beta_1) <= 1e-8 * (1 + abs(ss.beta_1))
    assert abs(ss.beta_2 - oracle.beta_2) <= 1e-8 * (1 + abs(ss.beta_2))
    assert abs(ss.delta_c_eff - oracle.delta_c_eff) <= 1e-8


@settings(max_examples=10, deadline=None)
@given(
    drive=st.floats(1.0, 12.0),
    gamma=st.floats(0.03, 0.1),
    lam=st.sampled_from([0.0, 0.1, 0.2]),
)
def test_oracle_solver_agreement_property(drive, gamma, lam):
    p = apply_overrides(
        DEFAULTS, {"drive": drive, "gamma_1": gamma, "gamma_2": gamma, "lambda_opa": lam}
    )
    try:
        oracle = integrate_classical(p, t_end=3000.0, dt=0.01, mode="paper")
    except Diverged:
        return  # classical flow not attracting here; nothing to compare
    ss = solve_mean_field(p, mode="paper")
    assert abs(abs(ss.alpha_a) - abs(oracle.alpha_a)) <= 1e-6 * (1 + abs(ss.alpha_a))
    assert abs(abs(ss.alpha_c) - abs(oracle.alpha_c)) <= 1e-6 * (1 + abs(ss.alpha_c))
    assert abs(ss.beta_1 - oracle.beta_1) <= 1e-6 * (1 + abs(ss.beta_1))
    assert abs(ss.beta_2 - oracle.beta_2) <= 1e-6 * (1 + abs(ss.beta_2))


def test_oracle_diverges_above_parametric_threshold():
    p = apply_overrides(DEFAULTS, {"lambda_opa": 0.5})
    with pytest.raises(Diverged):
        integrate_classical(p, t_end=3000.0, dt=0.005)


def test_oracle_flags_nonattracting_flow_at_published_defaults():
    # the steady-state relations' own linearized flow is repelling at the
    # published operating point, so the oracle must refuse rather than
    # return a wandering endpoint
    with pytest.raises(Diverged):
        integrate_classical(DEFAULTS, t_end=10000.0, dt=0.005, mode="paper")


def test_oracle_rejects_coarse_timestep():
    with pytest.raises(ValueError):
        integrate_classical(DEFAULTS, t_end=10.0, dt=0.5)
