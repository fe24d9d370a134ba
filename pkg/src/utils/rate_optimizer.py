"""
LTAT 최대화 전송률 선택 모듈

아웃티지 제약 p_out,K ≤ ε 하에서 라운드별 전송률을 고르는 세 가지 방법을 제공합니다.
- optimize_alternating: 좌표별 Dinkelbach 부분 문제를 번갈아 푸는 준최적 알고리즘
- optimize_grid: [R_lo, R_hi]^K 격자 전수 탐색 (K ≤ 4, 기준값)
- optimize_fixed_rate: 모든 라운드에 같은 전송률을 쓰는 기존 방식
- boundary_move: 활성 제약 경계를 따라가는 보조 1차원 탐색

좌표 인덱스 j 는 0 부터 시작합니다.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from models.rate_optimization import IterationRecord, RateOptProblem, RateOptResult
from .errors import InfeasibleError, PreconditionError
from .line_search import DinkelbachResult, dinkelbach, maximize_1d
from .outage_analyzer import AsymptoticOutage

logger = logging.getLogger(__name__)

MAX_GRID_DIMENSION = 4
# 이분 탐색은 tol_rate 의 1/100 까지 좁힙니다
BISECTION_SHRINK = 1e-2
# p_out,K 가 ε 의 이 비율 이상이면 제약이 활성이라고 봅니다
ACTIVE_CONSTRAINT_RATIO = 1.0 - 1e-3


def _evaluator(problem: RateOptProblem, evaluator: Optional[AsymptoticOutage]) -> AsymptoticOutage:
    return evaluator if evaluator is not None else AsymptoticOutage(problem.model, problem.snr_linear)


def _with_rate(rates: np.ndarray, j: int, value: float) -> np.ndarray:
    trial = np.array(rates, dtype=float)
    trial[j] = value
    return trial


def _largest_feasible(outage_of: Callable[[float], float], low: float, high: float,
                      limit: float, tol: float) -> float:
    """단조 증가 outage_of 에 대해 outage_of(R) ≤ limit 인 가장 큰 R 을 이분 탐색"""
    if outage_of(low) > limit:
        raise InfeasibleError(f"R = {low:.6g} 에서도 아웃티지 {outage_of(low):.3e} 가 한계 {limit:.3e} 를 넘습니다")
    if outage_of(high) <= limit:
        return high
    while high - low > tol:
        middle = 0.5 * (low + high)
        if outage_of(middle) <= limit:
            low = middle
        else:
            high = middle
    return low


def max_feasible_rate(problem: RateOptProblem, rates: Sequence[float], j: int,
                      evaluator: Optional[AsymptoticOutage] = None) -> float:
    """
    다른 좌표를 고정했을 때 p_out,K ≤ ε 를 만족하는 가장 큰 R_j

    p_out,K 가 R_j 에 대해 증가 함수이므로 이분 탐색을 사용합니다.

    Raises:
        InfeasibleError: R_j = R_lo 에서도 제약을 만족하지 못하는 경우
    """
    evaluator = _evaluator(problem, evaluator)
    rates = np.asarray(rates, dtype=float)
    low, high = problem.rate_bounds
    return _largest_feasible(
        lambda value: evaluator.outage(_with_rate(rates, j, value)),
        low, high, problem.outage_limit, BISECTION_SHRINK * problem.tol_rate)


def _ltat_parts(evaluator: AsymptoticOutage, rates: np.ndarray) -> Tuple[float, float]:
    """(1 - p_K, Σ p_{k-1}/R_k), 중간 라운드 아웃티지는 [0, 1] 로 자름"""
    p_out = np.clip(evaluator.profile(rates), 0.0, 1.0)
    previous = np.concatenate([[1.0], p_out[:-1]])
    return 1.0 - p_out[-1], float(np.sum(previous / rates))


def solve_coordinate(problem: RateOptProblem, rates: Sequence[float], j: int,
                     evaluator: Optional[AsymptoticOutage] = None) -> DinkelbachResult:
    """dinkelbach_subproblem 의 전체 결과 (λ 이력 포함)"""
    evaluator = _evaluator(problem, evaluator)
    rates = np.asarray(rates, dtype=float)
    low = problem.rate_bounds[0]
    cap = max_feasible_rate(problem, rates, j, evaluator)

    def numerator(value: float) -> float:
        success, _ = _ltat_parts(evaluator, _with_rate(rates, j, value))
        return value * success

    def denominator(value: float) -> float:
        _, expected_uses = _ltat_parts(evaluator, _with_rate(rates, j, value))
        return value * expected_uses

    if cap <= low:
        ratio = numerator(low) / denominator(low)
        return DinkelbachResult(x=low, ratio=ratio, lambdas=[ratio], converged=True)

    return dinkelbach(numerator, denominator, low, cap,
                      tol_x=problem.tol_rate, tol_ratio=problem.tol_ltat,
                      max_iter=problem.max_dinkelbach)


def dinkelbach_subproblem(problem: RateOptProblem, rates: Sequence[float], j: int,
                          evaluator: Optional[AsymptoticOutage] = None) -> float:
    """
    좌표 j 에 대한 단일 변수 LTAT 최대화

    T(R_j) = R_j(1 - p_K) / (R_j·Σ_k p_{k-1}/R_k) 를 실현 가능 구간 [R_lo, R_feas] 에서
    Dinkelbach 알고리즘으로 최대화합니다. j 앞 좌표는 새 값, 뒤 좌표는 이전 값입니다.

    Returns:
        float: 최적 R_j
    """
    result = solve_coordinate(problem, rates, j, evaluator)
    if not result.converged:
        logger.debug(f"좌표 {j} Dinkelbach 가 {result.iterations} 회 안에 수렴하지 않았습니다")
    return result.x


def boundary_move(problem: RateOptProblem, rates: Sequence[float], j: int,
                  evaluator: Optional[AsymptoticOutage] = None) -> Optional[np.ndarray]:
    """
    제약 경계 위에서 좌표 j 를 움직이는 1차원 탐색

    마지막 좌표 R_K 를 나머지 좌표에 대한 최대 실현 가능 값으로 두고 R_j 에 대해 T 를 최대화합니다.
    p_out,K = ε 인 점에서 단일 좌표 갱신을 보완합니다.

    Args:
        j: 움직일 좌표 (0 ≤ j < K-1)

    Returns:
        경계 위 최적 전송률 벡터, R_K = R_lo 로도 좌표 j 의 실현 가능 구간이 비면 None
    """
    anchor = problem.K - 1
    if not (0 <= j < anchor):
        raise PreconditionError(f"경계 이동 좌표는 0 ≤ j < K-1 이어야 합니다: j={j}, K={problem.K}")
    evaluator = _evaluator(problem, evaluator)
    rates = np.asarray(rates, dtype=float)
    low = problem.rate_bounds[0]

    try:
        cap = max_feasible_rate(problem, _with_rate(rates, anchor, low), j, evaluator)
    except InfeasibleError:
        return None

    def on_boundary(value: float) -> np.ndarray:
        trial = _with_rate(rates, j, value)
        trial[anchor] = max_feasible_rate(problem, trial, anchor, evaluator)
        return trial

    def objective(value: float) -> float:
        try:
            return evaluator.ltat(on_boundary(value))
        except InfeasibleError:
            return 0.0

    if cap <= low:
        return on_boundary(low)
    search = maximize_1d(objective, low, cap, problem.tol_rate)
    return on_boundary(search.x)


def _result(method: str, rates: np.ndarray, evaluator: AsymptoticOutage, problem: RateOptProblem,
            **kwargs) -> RateOptResult:
    outage = evaluator.outage(rates)
    return RateOptResult(
        rates=[float(r) for r in rates],
        ltat=evaluator.ltat(rates),
        outage=outage,
        feasible=outage <= problem.outage_limit,
        method=method,
        **kwargs,
    )


def _infeasible(method: str, problem: RateOptProblem, evaluator: AsymptoticOutage, message: str) -> RateOptResult:
    logger.warning(f"[{method}] ε={problem.epsilon:g} 불능: {message}")
    rates = np.full(problem.K, problem.rate_bounds[0])
    result = _result(method, rates, evaluator, problem, message=message)
    result.feasible = False
    return result


def optimize_fixed_rate(problem: RateOptProblem, evaluator: Optional[AsymptoticOutage] = None) -> RateOptResult:
    """
    R_1 = ... = R_K = R 인 고정 전송률 방식

    실현 가능 구간 [R_lo, R_feas] 에서 황금분할 탐색으로 T 를 최대화합니다.
    """
    evaluator = _evaluator(problem, evaluator)
    K = problem.K
    low, high = problem.rate_bounds

    def outage_of(value: float) -> float:
        return evaluator.outage(np.full(K, value))

    try:
        cap = _largest_feasible(outage_of, low, high, problem.outage_limit,
                                BISECTION_SHRINK * problem.tol_rate)
    except InfeasibleError as e:
        return _infeasible('fixed', problem, evaluator, str(e))

    if cap <= low:
        best = low
    else:
        best = maximize_1d(lambda value: evaluator.ltat(np.full(K, value)), low, cap, problem.tol_rate).x
    result = _result('fixed', np.full(K, best), evaluator, problem, outer_iterations=1)
    result.trace.append(IterationRecord(iteration=1, rates=result.rates, ltat=result.ltat))
    logger.info(f"고정 전송률: R={best:.6f}, LTAT={result.ltat:.6f}")
    return result


def optimize_alternating(problem: RateOptProblem, initial: Union[None, str, Sequence[float]] = 'warm',
                         evaluator: Optional[AsymptoticOutage] = None) -> RateOptResult:
    """
    좌표별 Dinkelbach 부분 문제를 j = 1..K 순서로 반복하는 준최적 전송률 선택

    제약이 활성이면 각 스윕 뒤에 boundary_move 로 경계를 따라 이동합니다.
    LTAT 개선이 tol_ltat 미만이거나 max_outer 에 도달하면 종료합니다.

    Args:
        problem: 최적화 문제
        initial: 'warm' (고정 전송률 해에서 시작) 또는 초기 전송률 벡터

    Returns:
        RateOptResult: 최적 전송률, LTAT, 반복 이력
    """
    evaluator = _evaluator(problem, evaluator)
    K = problem.K
    low, high = problem.rate_bounds

    rates = None
    if initial is not None and not isinstance(initial, str):
        rates = np.clip(np.asarray(initial, dtype=float).reshape(-1), low, high)
        if rates.shape[0] != K:
            raise PreconditionError(f"초기 전송률 길이 {rates.shape[0]} 가 K={K} 와 다릅니다")
        if evaluator.outage(rates) > problem.outage_limit:
            logger.warning("초기 전송률이 제약을 만족하지 않아 고정 전송률 해에서 시작합니다")
            rates = None
    elif initial not in (None, 'warm'):
        raise PreconditionError(f"initial 은 'warm' 또는 전송률 벡터여야 합니다: {initial!r}")

    if rates is None:
        warm = optimize_fixed_rate(problem, evaluator)
        if not warm.feasible:
            return _infeasible('alternating', problem, evaluator, warm.message or "실현 가능한 전송률이 없습니다")
        rates = np.asarray(warm.rates)

    current = evaluator.ltat(rates)
    trace = [IterationRecord(iteration=0, rates=rates.tolist(), ltat=current)]
    iterations = 0

    for iterations in range(1, problem.max_outer + 1):
        previous = current
        for j in range(K):
            try:
                candidate = _with_rate(rates, j, dinkelbach_subproblem(problem, rates, j, evaluator))
            except InfeasibleError:
                continue
            value = evaluator.ltat(candidate)
            if value >= current and evaluator.outage(candidate) <= problem.outage_limit:
                rates, current = candidate, value
        if K > 1 and evaluator.outage(rates) >= ACTIVE_CONSTRAINT_RATIO * problem.epsilon:
            for j in range(K - 1):
                candidate = boundary_move(problem, rates, j, evaluator)
                if candidate is None:
                    continue
                value = evaluator.ltat(candidate)
                if value > current and evaluator.outage(candidate) <= problem.outage_limit:
                    logger.debug(f"경계 이동 (좌표 {j}): LTAT {current:.9f} -> {value:.9f}")
                    rates, current = candidate, value
        trace.append(IterationRecord(iteration=iterations, rates=rates.tolist(), ltat=current))
        logger.info(f"외부 반복 {iterations}: LTAT={current:.9f}, rates={np.round(rates, 6).tolist()}")
        if current - previous < problem.tol_ltat:
            break

    return _result('alternating', rates, evaluator, problem, outer_iterations=iterations, trace=trace)


def _lattice(problem: RateOptProblem, step: float) -> np.ndarray:
    low, high = problem.rate_bounds
    count = int(math.floor((high - low) / step + 1e-9)) + 1
    return np.round(low + step * np.arange(count), 12)


def _better(candidate: Tuple[float, Tuple[float, ...]], best: Optional[Tuple[float, Tuple[float, ...]]]) -> bool:
    if best is None:
        return True
    if candidate[0] != best[0]:
        return candidate[0] > best[0]
    return candidate[1] < best[1]


def optimize_grid(problem: RateOptProblem, step: float, workers: int = 1,
                  evaluator: Optional[AsymptoticOutage] = None) -> RateOptResult:
    """
    [R_lo, R_hi]^K 격자 전수 탐색 (K ≤ 4)

    마지막 좌표는 오름차순으로 훑다가 처음 제약을 넘으면 중단합니다 (p_out,K 가 좌표별 증가 함수).
    최대값이 같으면 사전순으로 작은 전송률 벡터를 고릅니다.
    """
    if problem.K > MAX_GRID_DIMENSION:
        raise PreconditionError(f"격자 탐색은 K ≤ {MAX_GRID_DIMENSION} 에서만 허용됩니다: K={problem.K}")
    if step <= 0:
        raise PreconditionError(f"격자 간격은 양수여야 합니다: {step}")
    evaluator = _evaluator(problem, evaluator)
    axis = _lattice(problem, step)
    limit = problem.outage_limit

    def scan(prefix: Tuple[float, ...]) -> Optional[Tuple[float, Tuple[float, ...]]]:
        best = None
        for last in axis:
            rates = np.array(prefix + (float(last),))
            if evaluator.outage(rates) > limit:
                break
            candidate = (evaluator.ltat(rates), tuple(float(r) for r in rates))
            if _better(candidate, best):
                best = candidate
        return best

    prefixes = list(itertools.product(axis.tolist(), repeat=problem.K - 1))
    logger.info(f"격자 탐색: 축당 {axis.size} 점, 접두 {len(prefixes)} 개")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            row_bests = list(pool.map(scan, prefixes))
    else:
        row_bests = [scan(prefix) for prefix in prefixes]

    best = None
    for candidate in row_bests:
        if candidate is not None and _better(candidate, best):
            best = candidate

    if best is None:
        return _infeasible('grid', problem, evaluator, "격자 위에 실현 가능한 점이 없습니다")
    return _result('grid', np.array(best[1]), evaluator, problem, outer_iterations=1)
