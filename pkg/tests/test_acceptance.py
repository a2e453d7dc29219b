"""Acceptance suite: one test per criterion, each at its stated tolerance.

A pass/fail line per criterion is printed in the terminal summary.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from laserqhe.closed_forms import (
    emp_fixed_wh,
    emp_low_t,
    optimal_p,
    optimal_p_high_t,
    optimal_p_low_t,
    taylor_one_parameter,
)
from laserqhe.liouvillian import (
    density_matrix_violations,
    evolve,
    maximally_mixed,
    solve_steady_full,
    solve_steady_reduced,
)
from laserqhe.observables import hot_heat_flux_from_state, power_closed_form, power_from_state
from laserqhe.optimize import emp_numeric, optimize_power
from laserqhe.params import FIG2_PARAMS, FIG3_PARAMS, EngineParams
from laserqhe.universality import (
    emp_second_order,
    extract_emp_series,
    flux_derivatives,
    solve_alpha,
    symmetry_defect,
)

SAMPLE_SIZE = 200


def random_params(count, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        gc, gh = rng.uniform(0.05, 2.0, size=2)
        tc, th = np.sort(rng.uniform(1.0, 20.0, size=2))
        wc, wh = np.sort(rng.uniform(0.5, 20.0, size=2))
        out.append(
            EngineParams(
                omega_c=float(wc),
                omega_h=float(wh),
                gamma_c=float(gc),
                gamma_h=float(gh),
                lam=float(rng.uniform(0.0, 1.0)),
                p=float(rng.uniform(-1.0, 1.0)),
                t_c=float(tc),
                t_h=float(th),
            )
        )
    return out


def close(a, b, rel=1e-9, floor=1e-12):
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), floor)


@pytest.mark.criterion(1, "triple-path power equality")
def test_triple_path_power_equality():
    start = time.perf_counter()
    for params in random_params(SAMPLE_SIZE):
        reduced = power_from_state(params, solve_steady_reduced(params).state)
        full = power_from_state(params, solve_steady_full(params).state)
        closed = power_closed_form(params)
        assert close(reduced, full) and close(reduced, closed) and close(full, closed), params
    assert time.perf_counter() - start < 5.0


@pytest.mark.criterion(2, "steady-state validity")
def test_state_validity():
    cases = random_params(SAMPLE_SIZE) + [FIG2_PARAMS.replace(lam=lam) for lam in (0.0, 0.1, 0.2, 0.3)]
    for params in cases:
        for sol in (solve_steady_reduced(params), solve_steady_full(params)):
            rho = sol.state
            assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
            assert abs(np.trace(rho) - 1) <= 1e-12
            assert np.linalg.eigvalsh(rho)[0] >= -1e-10
            assert density_matrix_violations(rho) == []


@pytest.mark.criterion(3, "fixed-point attraction")
def test_fixed_point_attraction():
    params = FIG2_PARAMS
    target = solve_steady_full(params).state
    traj = evolve(params, maximally_mixed(), horizon=400.0, step=0.05, store_every=1000)
    assert np.max(np.abs(traj.final - target)) <= 1e-6
    horizon = 20.0
    still = evolve(params, target, horizon=horizon, step=0.05, store_every=400)
    assert np.max(np.abs(still.final - target)) / horizon < 1e-10


@pytest.mark.criterion(4, "efficiency identity and zero-power point")
def test_efficiency_identity():
    for params in random_params(SAMPLE_SIZE):
        state = solve_steady_full(params).state
        heat = hot_heat_flux_from_state(params, state)
        if heat != 0.0:
            ratio = power_from_state(params, state) / heat
            assert abs(ratio - (1 - params.omega_c / params.omega_h)) <= 1e-12
    for params in (FIG2_PARAMS.replace(lam=0.2, p=0.3), FIG3_PARAMS.replace(p=-0.5), *random_params(5, seed=3)):
        params = params.replace(lam=max(params.lam, 0.05), p=min(params.p, 0.95))
        wh = params.omega_h
        ratio = params.t_c / params.t_h

        def power_at(wc):
            return power_closed_form(params.replace(omega_c=wc))

        root = brentq(power_at, 0.5 * ratio * wh, 0.5 * (1 + ratio) * wh, xtol=1e-14, rtol=1e-15)
        assert abs(root / wh - ratio) <= 1e-10


@pytest.mark.criterion(5, "optimal coherence parameter and its limits")
def test_optimal_coherence():
    checked = 0
    for params in [FIG2_PARAMS.replace(lam=lam) for lam in (0.05, 0.1, 0.2, 0.3)] + random_params(40, seed=5):
        p_star = optimal_p(params)
        if not -1 < p_star < 1 or params.omega_c / params.t_c <= params.omega_h / params.t_h:
            continue
        opt = optimize_power(params, "over_p")
        assert abs(opt.p - p_star) <= 1e-6
        checked += 1
    assert checked >= 10

    def equal_occupation(n, lam=0.3, gh=0.5):
        ratio = math.log1p(1 / n)
        return EngineParams(ratio * 5.0, ratio * 8.0, 0.4, gh, lam, 0.0, 5.0, 8.0)

    # compared through 1 + p, relative to the larger of the two values
    for n in (100.0, 150.0, 400.0, 1000.0):
        params = equal_occupation(n)
        assert math.isclose(1 + optimal_p_high_t(params), 1 + optimal_p(params), rel_tol=0.01)
    for n in (0.01, 0.005, 0.001):
        params = equal_occupation(n)
        assert math.isclose(1 + optimal_p_low_t(params), 1 + optimal_p(params), rel_tol=0.01)


@pytest.mark.criterion(6, "power-vs-p figure: argmax shift and weak-coupling decrease")
def test_power_vs_p_figure():
    grid = np.linspace(-1.0, 1.0, 101)
    on_grid, refined = [], []
    for lam in (0.1, 0.2, 0.3):
        powers = [power_closed_form(FIG2_PARAMS.replace(lam=lam, p=float(p))) for p in grid]
        on_grid.append(grid[int(np.argmax(powers))])
        refined.append(optimize_power(FIG2_PARAMS.replace(lam=lam), "over_p").p)
    assert on_grid[0] < on_grid[1] < on_grid[2]
    assert refined[0] < refined[1] < refined[2]

    n_h = FIG2_PARAMS.occupations().n_h
    weak = FIG2_PARAMS.replace(lam=1e-3 * FIG2_PARAMS.gamma_h * (1 + n_h))
    interior = grid[1:-1]
    powers = np.array([power_closed_form(weak.replace(p=float(p))) for p in interior])
    assert np.all(np.diff(powers) < 0)
    # the only rise sits in a sliver of width 1 + p* next to p = -1
    assert 1 + optimal_p(weak) < interior[0] + 1


@pytest.mark.criterion(7, "low-temperature EMP and its series")
def test_low_t_emp():
    for eta in np.round(np.arange(0.1, 0.95, 0.1), 1):
        params = FIG2_PARAMS.replace(t_c=FIG2_PARAMS.t_h * (1 - eta))
        assert abs(emp_numeric(params, "two_param", "low_t") - emp_low_t(eta)) <= 1e-8
    series = extract_emp_series(FIG2_PARAMS, "two_param", "low_t")
    assert abs(series.c1 - 0.5) <= 5e-3 and abs(series.c2 - 0.125) <= 5e-3
    assert abs(series.c3 - 7 / 96) <= 0.1 * 7 / 96


@pytest.mark.criterion(8, "one-parameter strong-coupling EMP")
def test_one_parameter_emp():
    rng = np.random.default_rng(8)
    for _ in range(10):
        gc, gh = rng.uniform(0.05, 2.0, size=2)
        params = FIG3_PARAMS.replace(gamma_c=float(gc), gamma_h=float(gh), p=float(rng.uniform(-0.9, 1.0)))
        assert abs(emp_numeric(params, "fixed_wh", "strong_ht") - emp_fixed_wh(params.carnot, params)) <= 1e-8
        for scheme in ("fixed_wh", "fixed_wc", "sum_constraint"):
            fitted = extract_emp_series(params, scheme, "strong_ht").c2
            assert abs(fitted - taylor_one_parameter(scheme, params).c2) <= 5e-3
    symmetric = FIG3_PARAMS.replace(gamma_c=0.5, gamma_h=0.5, p=0.0)
    expected = {"fixed_wh": 1 / 16, "fixed_wc": 3 / 16, "sum_constraint": 1 / 8, "product_constraint": 1 / 8}
    for scheme, c2 in expected.items():
        assert abs(extract_emp_series(symmetric, scheme, "strong_ht").c2 - c2) <= 5e-3


@pytest.mark.criterion(9, "flux symmetry and the universal second-order term")
def test_symmetry_universality():
    symmetric = FIG2_PARAMS.replace(gamma_c=0.5, gamma_h=0.5, p=0.0)
    assert symmetry_defect("high_t", symmetric)[0] <= 1e-12
    assert abs(emp_second_order(symmetric, "high_t") - 0.125) <= 1e-3
    assert symmetry_defect("general", symmetric)[0] > 1e-6
    assert abs(emp_second_order(symmetric, "general") - 0.125) > 1e-3
    for p in (-0.5, 0.0, 0.5, 0.9):
        c2 = emp_second_order(symmetric.replace(p=p), "high_t")
        assert abs(c2 - (1 + p) / (4 * (2 + p))) <= 1e-3


@pytest.mark.criterion(10, "low-temperature alpha and finite-difference derivatives")
def test_low_t_alpha():
    assert abs(solve_alpha(None, "low_t") - 2.0) <= 1e-9
    for x in (0.5, 1.0, 2.0, 3.5):
        d = flux_derivatives("low_t", x)
        e = math.exp(-x)
        assert abs(d.l_value + e) <= 1e-8
        assert abs(d.m_value + e / 2) <= 1e-8
        assert abs(d.dl_dx - e) <= 1e-8


@pytest.mark.criterion(11, "EMP-vs-p figure: EMP increases with p")
def test_emp_vs_p_figure():
    ps = np.linspace(-0.95, 1.0, 40)
    for eta in np.linspace(0.01, 0.4, 40):
        curve = [emp_fixed_wh(float(eta), FIG3_PARAMS.replace(p=float(p))) for p in ps]
        assert np.all(np.diff(curve) > 0)


@pytest.mark.criterion(12, "byte-identical CLI output")
def test_cli_determinism(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("lambda = 0.2\np = 0.3\ngamma_c = 0.3\n", encoding="utf-8")
    commands = [
        ["fig2"],
        ["fig3"],
        ["power-sweep", "--sweep", "p:-1:1:41"],
        ["steady"],
        ["optimize", "--scheme", "two_param"],
        ["universality", "--kind", "general"],
    ]
    for i, args in enumerate(commands):
        outputs = []
        for run in range(2):
            path = tmp_path / f"out{i}_{run}"
            proc = subprocess.run(
                [sys.executable, "-m", "laserqhe.cli", *args, "--config", str(config), "--output", str(path)],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1] and outputs[0]
