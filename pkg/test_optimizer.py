"""1차원 탐색 / Dinkelbach / 전송률 최적화 테스트"""
import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from models.rate_optimization import RateOptProblem
from utils import beckmann_channel as channel
from utils.errors import InfeasibleError, PreconditionError
from utils.line_search import dinkelbach, golden_section_max, maximize_1d
from utils.outage_analyzer import AsymptoticOutage, db_to_linear
from utils.rate_optimizer import (ACTIVE_CONSTRAINT_RATIO, boundary_move, dinkelbach_subproblem, max_feasible_rate,
                                  optimize_alternating, optimize_fixed_rate, optimize_grid, solve_coordinate)


def make_problem(model, snr_db, epsilon, **kwargs):
    return RateOptProblem(model=model, snr_linear=np.full(model.K, db_to_linear(snr_db)),
                          epsilon=epsilon, **kwargs)


@pytest.fixture
def k2_problem(reference_model_k2):
    return make_problem(reference_model_k2, 25.0, 1e-3)


def test_golden_section_finds_interior_maximum():
    result = golden_section_max(lambda x: -(x - 2.0) ** 2, 0.0, 5.0, tol=1e-8)

    assert result.x == pytest.approx(2.0, abs=1e-6)
    assert result.unimodal


def test_maximize_1d_prefers_endpoint_maximum():
    result = maximize_1d(lambda x: x, 0.0, 1.0, tol=1e-6)

    assert result.x == 1.0


def test_maximize_1d_falls_back_on_multimodal_function(caplog):
    result = maximize_1d(lambda x: math.cos(6 * math.pi * x), 0.0, 1.0, tol=1e-6)

    assert result.value == pytest.approx(1.0)
    assert any('조밀 격자' in record.getMessage() for record in caplog.records)


def test_dinkelbach_fractional_maximum():
    result = dinkelbach(lambda x: x, lambda x: 1.0 + x * x, 0.0, 3.0, tol_x=1e-9, tol_ratio=1e-10)

    assert result.converged
    assert result.x == pytest.approx(1.0, abs=1e-4)
    assert result.ratio == pytest.approx(0.5, rel=1e-9)
    assert all(b >= a for a, b in zip(result.lambdas, result.lambdas[1:]))


def test_problem_validation(reference_model_k2):
    with pytest.raises(PreconditionError):
        make_problem(reference_model_k2, 25.0, 0.0)
    with pytest.raises(PreconditionError):
        make_problem(reference_model_k2, 25.0, 1e-3, rate_bounds=(2.0, 1.0))
    with pytest.raises(PreconditionError):
        RateOptProblem(model=reference_model_k2, snr_linear=[100.0], epsilon=1e-3)


def test_max_feasible_rate_rayleigh(rayleigh_k1):
    # (2^R - 1)/100 ≤ 0.07 ⇔ R ≤ 3
    problem = make_problem(rayleigh_k1, 20.0, 0.07)

    assert max_feasible_rate(problem, [1.0], 0) == pytest.approx(3.0, abs=1e-6)


def test_max_feasible_rate_infeasible(reference_model_k2):
    problem = make_problem(reference_model_k2, 25.0, 1e-12)

    with pytest.raises(InfeasibleError):
        max_feasible_rate(problem, [1.0, 1.0], 1)


def test_fixed_rate_matches_scalar_reference(rayleigh_k1):
    problem = make_problem(rayleigh_k1, 20.0, 0.5)
    result = optimize_fixed_rate(problem)

    reference = minimize_scalar(lambda r: -r * (1 - (2 ** r - 1) / 100), bounds=(0.1, math.log2(51)),
                                method='bounded', options={'xatol': 1e-10})
    assert result.feasible
    assert result.rates[0] == pytest.approx(reference.x, abs=1e-4)
    assert result.ltat == pytest.approx(-reference.fun, rel=1e-9)


def test_subproblem_stays_feasible(k2_problem):
    evaluator = AsymptoticOutage(k2_problem.model, k2_problem.snr_linear)
    rates = [2.0, 2.0]
    for j in range(2):
        value = dinkelbach_subproblem(k2_problem, rates, j, evaluator)
        trial = list(rates)
        trial[j] = value
        assert k2_problem.rate_bounds[0] <= value <= k2_problem.rate_bounds[1]
        assert evaluator.outage(trial) <= k2_problem.outage_limit


def test_subproblem_lambda_non_decreasing(k2_problem):
    result = solve_coordinate(k2_problem, [2.0, 2.0], 1)

    assert all(b >= a for a, b in zip(result.lambdas, result.lambdas[1:]))


def test_alternating_beats_fixed_and_is_monotone(k2_problem):
    fixed = optimize_fixed_rate(k2_problem)
    variable = optimize_alternating(k2_problem)

    assert variable.feasible
    assert variable.ltat >= fixed.ltat
    assert variable.outage <= k2_problem.outage_limit
    assert variable.outer_iterations <= 10
    ltats = [record.ltat for record in variable.trace]
    assert all(b >= a for a, b in zip(ltats, ltats[1:]))


def test_alternating_close_to_grid(k2_problem):
    variable = optimize_alternating(k2_problem)
    grid = optimize_grid(k2_problem, step=0.05, workers=2)

    assert grid.feasible
    assert variable.ltat >= grid.ltat * 0.99


@pytest.mark.parametrize('rho, epsilon', [(0.8, 1e-4), (0.5, 1e-3)])
def test_alternating_close_to_grid_on_other_instances(rho, epsilon):
    model = channel.build_exponential_model(2, rho, [(1 + 1j) / math.sqrt(2)] * 2)
    problem = make_problem(model, 25.0, epsilon)
    variable = optimize_alternating(problem)
    grid = optimize_grid(problem, step=0.05, workers=2)

    assert variable.outer_iterations <= 10
    assert variable.ltat >= grid.ltat * 0.99


def test_alternating_moves_off_fixed_rate_point(k2_problem):
    fixed = optimize_fixed_rate(k2_problem)
    variable = optimize_alternating(k2_problem)

    # 고정 전송률 해는 제약 경계 위에 있어 단일 좌표 갱신만으로는 벗어나지 못함
    assert variable.ltat > 1.05 * fixed.ltat
    assert variable.rates[0] > variable.rates[1]


def test_boundary_move_stays_on_active_constraint(k2_problem):
    evaluator = AsymptoticOutage(k2_problem.model, k2_problem.snr_linear)
    start = optimize_fixed_rate(k2_problem, evaluator)
    moved = boundary_move(k2_problem, start.rates, 0, evaluator)

    assert evaluator.outage(moved) <= k2_problem.outage_limit
    assert evaluator.outage(moved) >= ACTIVE_CONSTRAINT_RATIO * k2_problem.epsilon
    assert evaluator.ltat(moved) >= start.ltat
    with pytest.raises(PreconditionError):
        boundary_move(k2_problem, start.rates, 1, evaluator)


def test_alternating_is_deterministic(k2_problem):
    first = optimize_alternating(k2_problem)
    second = optimize_alternating(k2_problem)

    assert first.rates == second.rates
    assert first.ltat == second.ltat


def test_explicit_initial_vector(k2_problem):
    result = optimize_alternating(k2_problem, initial=[1.0, 1.0])

    assert result.feasible
    assert result.trace[0].rates == [1.0, 1.0]
    with pytest.raises(PreconditionError):
        optimize_alternating(k2_problem, initial=[1.0, 1.0, 1.0])


def test_ltat_non_decreasing_along_epsilon_ladder(reference_model_k2):
    values = [optimize_alternating(make_problem(reference_model_k2, 25.0, eps)).ltat for eps in (1e-4, 1e-3, 1e-2)]

    assert values[0] <= values[1] <= values[2]


def test_non_binding_constraint_hits_upper_bound(reference_model_k2):
    problem = make_problem(reference_model_k2, 40.0, 0.999, rate_bounds=(0.1, 2.0))

    assert optimize_alternating(problem).rates == pytest.approx([2.0, 2.0])
    assert optimize_fixed_rate(problem).rates == pytest.approx([2.0, 2.0])


def test_infeasible_epsilon_is_flagged(reference_model_k2):
    problem = make_problem(reference_model_k2, 25.0, 1e-12)

    for result in (optimize_fixed_rate(problem), optimize_alternating(problem), optimize_grid(problem, 0.5)):
        assert not result.feasible
        assert result.message


def test_grid_limited_to_four_rounds():
    model = channel.build_exponential_model(5, 0.5, [0.0] * 5)
    problem = make_problem(model, 30.0, 1e-2)

    with pytest.raises(PreconditionError):
        optimize_grid(problem, 0.5)


def test_grid_picks_best_lattice_point(rayleigh_k1):
    problem = make_problem(rayleigh_k1, 60.0, 0.999, rate_bounds=(0.5, 2.0))
    result = optimize_grid(problem, 0.5)

    assert result.rates == [2.0]


@pytest.mark.slow
def test_variable_rate_beats_fixed_on_k3_instance():
    model = channel.build_exponential_model(3, 0.8, [(1 + 1j) / math.sqrt(2)] * 3)
    for eps in (1e-4, 1e-3, 1e-2):
        problem = make_problem(model, 20.0, eps)
        assert optimize_alternating(problem).ltat >= optimize_fixed_rate(problem).ltat
