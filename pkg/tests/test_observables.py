import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import engine_params
from laserqhe.exceptions import DomainError, InconsistentStateError
from laserqhe.liouvillian import E0, E1, E2, solve_steady_full, solve_steady_reduced
from laserqhe.observables import (
    coherence_current,
    efficiency,
    hot_heat_flux_from_state,
    observables,
    power_closed_form,
    power_from_state,
    power_occupation_form,
    power_terms,
    steady_coherence,
)
from laserqhe.params import FIG2_PARAMS
import oracles

# Master-equation power at the power-vs-p caption parameters, from the mpmath oracle.
FIG2_POWER = {0.1: 0.00447721507619402, 0.2: 0.0107958897686826, 0.3: 0.014615725150307}


@pytest.mark.parametrize("lam", sorted(FIG2_POWER))
def test_caption_power_frozen(lam):
    params = FIG2_PARAMS.replace(lam=lam)
    assert power_closed_form(params) == pytest.approx(FIG2_POWER[lam], rel=1e-12)
    state = solve_steady_full(params).state
    assert power_from_state(params, state) == pytest.approx(FIG2_POWER[lam], rel=1e-12)


def test_closed_form_against_oracle_off_caption():
    raw = (3.3, 8.1, 1.2, 0.3, 0.7, -0.4, 2.5, 13.0)
    from laserqhe import EngineParams

    ref = float(oracles.power(raw))
    assert ref == pytest.approx(0.158786718775074, rel=1e-13)
    assert power_closed_form(EngineParams(*raw)) == pytest.approx(ref, rel=1e-12)


def test_denominator_terms_scale_as_expected():
    params = FIG2_PARAMS.replace(p=0.3)
    t1, t2, t3, t4 = power_terms(params)
    t1b, t2b, t3b, t4b = power_terms(params.replace(lam=2 * params.lam))
    assert t1b == pytest.approx(4 * t1) and t2b == pytest.approx(4 * t2)
    assert (t3b, t4b) == (t3, t4)
    # T1 and T3 are linear in q = 1 + p, T4 quadratic, T2 independent of q
    u1, u2, u3, u4 = power_terms(params.replace(p=-0.35))
    ratio = (1 - 0.35) / 1.3
    assert u1 == pytest.approx(t1 * ratio) and u2 == pytest.approx(t2)
    assert u3 == pytest.approx(t3 * ratio) and u4 == pytest.approx(t4 * ratio**2)


@settings(max_examples=80, deadline=None)
@given(engine_params())
def test_two_closed_forms_agree(params):
    a = power_closed_form(params)
    b = power_occupation_form(params)
    assert a == pytest.approx(b, rel=1e-11, abs=1e-14)


def test_steady_coherence_matches_solver():
    params = FIG2_PARAMS.replace(lam=0.3, p=0.2)
    state = solve_steady_full(params).state
    rho10 = steady_coherence(params)
    assert abs(rho10 - state[E1, E0]) < 1e-15
    assert abs(rho10 - state[E2, E0]) < 1e-15
    assert rho10.real == 0.0


def test_zero_power_cases():
    assert power_closed_form(FIG2_PARAMS.replace(lam=0.0)) == 0.0
    assert power_closed_form(FIG2_PARAMS.replace(p=-1.0)) == 0.0
    state = solve_steady_full(FIG2_PARAMS.replace(lam=0.0)).state
    assert power_from_state(FIG2_PARAMS.replace(lam=0.0), state) == 0.0


def test_observables_bundle():
    params = FIG2_PARAMS.replace(lam=0.2, p=0.4)
    state = solve_steady_reduced(params).state
    obs = observables(params, state)
    assert obs.power == pytest.approx(power_closed_form(params), rel=1e-12)
    assert obs.hot_heat_flux == pytest.approx(hot_heat_flux_from_state(params, state))
    assert obs.efficiency == pytest.approx(0.3)
    assert obs.coherence_current == pytest.approx(coherence_current(state))


def test_efficiency_independent_of_state():
    assert efficiency(FIG2_PARAMS) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        efficiency(FIG2_PARAMS.replace(omega_h=0.0))


def test_coherence_current_rejects_non_hermitian_state():
    rho = np.eye(4, dtype=complex) / 4
    rho[E0, E1] = 0.1
    rho[E1, E0] = 0.3
    with pytest.raises(InconsistentStateError):
        coherence_current(rho)


def test_power_sign_changes_at_carnot_point():
    # engine needs omega_c/omega_h > t_c/t_h, i.e. x > y
    base = FIG2_PARAMS.replace(lam=0.2, p=0.3)
    assert power_closed_form(base.replace(omega_c=6.1)) > 0
    assert power_closed_form(base.replace(omega_c=5.9)) < 0
    assert abs(power_closed_form(base.replace(omega_c=6.0))) < 1e-15


@settings(max_examples=80, deadline=None)
@given(engine_params())
def test_efficiency_identity(params):
    state = solve_steady_full(params).state
    heat = hot_heat_flux_from_state(params, state)
    if abs(heat) > 1e-13:
        ratio = power_from_state(params, state) / heat
        assert ratio == pytest.approx(1 - params.omega_c / params.omega_h, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(engine_params(), st.floats(0.0, 1.0))
def test_power_vanishes_without_drive_or_with_p_minus_one(params, frac):
    assert power_closed_form(params.replace(lam=0.0)) == 0.0
    assert power_closed_form(params.replace(p=-1.0)) == 0.0
    assert math.isfinite(power_closed_form(params.replace(p=-1.0 + frac)))
