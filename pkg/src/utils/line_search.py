"""
1차원 탐색 도구

- 황금분할 탐색 (최대화), 준오목성 위반 감지 포함
- 조밀 격자 탐색 (황금분할 실패 시 대체)
- Dinkelbach 분수 계획법
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import NumericalError

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2
# 내부 평가값이 구간 끝값보다 이만큼 (상대) 낮으면 준오목성 위반으로 판단
UNIMODAL_SLACK = 1e-9


@dataclass
class LineSearchResult:
    x: float
    value: float
    evaluations: int
    unimodal: bool = True


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-6) -> LineSearchResult:
    """
    황금분할 탐색으로 [a, b] 위 단봉 함수의 최대점 탐색

    오목(준오목) 함수의 내부 값은 min(f(a), f(b)) 이상이어야 하므로,
    탐색점이 이보다 낮으면 unimodal=False 로 표시합니다.
    """
    a, b = min(a, b), max(a, b)
    fa, fb = f(a), f(b)
    evaluations = 2
    floor = min(fa, fb)
    slack = UNIMODAL_SLACK * max(1.0, abs(floor))
    unimodal = True

    h = b - a
    if h > tol:
        n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
        c = a + INV_PHI_SQUARE * h
        d = a + INV_PHI * h
        yc, yd = f(c), f(d)
        evaluations += 2
        if min(yc, yd) < floor - slack:
            unimodal = False

        for _ in range(n - 1):
            if yc > yd:
                b, d, yd = d, c, yc
                h = INV_PHI * h
                c = a + INV_PHI_SQUARE * h
                yc = f(c)
                latest = yc
            else:
                a, c, yc = c, d, yd
                h = INV_PHI * h
                d = a + INV_PHI * h
                yd = f(d)
                latest = yd
            evaluations += 1
            if latest < floor - slack:
                unimodal = False

        x, value = (c, yc) if yc > yd else (d, yd)
    else:
        x, value = 0.5 * (a + b), f(0.5 * (a + b))
        evaluations += 1

    return LineSearchResult(x=x, value=value, evaluations=evaluations, unimodal=unimodal)


def dense_grid_max(f: Callable[[float], float], a: float, b: float, step: float) -> LineSearchResult:
    """[a, b] 를 step 간격 격자 (양 끝 포함) 로 평가해 최대점 반환"""
    count = max(2, int(math.ceil((b - a) / step)) + 1)
    grid = np.linspace(a, b, count)
    values = np.array([f(x) for x in grid])
    best = int(np.argmax(values))
    return LineSearchResult(x=float(grid[best]), value=float(values[best]), evaluations=count)


def maximize_1d(f: Callable[[float], float], a: float, b: float, tol: float) -> LineSearchResult:
    """
    황금분할 탐색 후 끝점과 비교하고, 준오목성 위반이 감지되면 조밀 격자 (간격 tol^½) 로 대체
    """
    result = golden_section_max(f, a, b, tol)
    if not result.unimodal:
        logger.warning(f"[{a:.6g}, {b:.6g}] 에서 단봉성 위반 감지, 조밀 격자 탐색으로 대체합니다")
        result = dense_grid_max(f, a, b, math.sqrt(tol))
    for endpoint in (a, b):
        value = f(endpoint)
        if value >= result.value:
            result = LineSearchResult(endpoint, value, result.evaluations + 1, result.unimodal)
    return result


@dataclass
class DinkelbachResult:
    x: float
    ratio: float
    lambdas: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def dinkelbach(numerator: Callable[[float], float], denominator: Callable[[float], float],
               a: float, b: float, tol_x: float = 1e-6, tol_ratio: float = 1e-6,
               max_iter: int = 30) -> DinkelbachResult:
    """
    Dinkelbach 알고리즘으로 max N(x)/D(x), x ∈ [a, b] (D > 0)

    λ 를 구간 중점의 비율로 시작해, x* = argmax N(x) - λD(x) 를 1차원 탐색으로 구하고
    λ ← N(x*)/D(x*) 로 갱신합니다. |F(λ)| < tol_ratio·D(x*) 이면 종료합니다.

    Returns:
        DinkelbachResult: 최적점, 비율, λ/F 이력
    """

    def ratio(x: float) -> float:
        value = numerator(x) / denominator(x)
        if not math.isfinite(value):
            raise NumericalError(f"목적 함수 값이 유한하지 않습니다: x={x}, N/D={value}")
        return value

    x = 0.5 * (a + b)
    lam = ratio(x)
    best_x = x
    result = DinkelbachResult(x=x, ratio=lam, lambdas=[lam])

    for iteration in range(1, max_iter + 1):
        search = maximize_1d(lambda t: numerator(t) - lam * denominator(t), a, b, tol_x)
        x = search.x
        residual = search.value
        d = denominator(x)
        if not (math.isfinite(residual) and math.isfinite(d)):
            raise NumericalError(f"Dinkelbach 부분 문제 값이 유한하지 않습니다: x={x}")
        result.residuals.append(residual)
        result.iterations = iteration
        logger.debug(f"Dinkelbach {iteration}: λ={lam:.12g}, x*={x:.9g}, F={residual:.3e}")

        new_lam = ratio(x)
        if new_lam >= lam:
            best_x = x
        elif new_lam < lam - 1e-12 * max(1.0, abs(lam)):
            logger.warning(f"Dinkelbach λ 가 감소했습니다: {lam:.12g} -> {new_lam:.12g}")
            break
        if abs(residual) < tol_ratio * d:
            result.converged = True
            break
        lam = max(lam, new_lam)
        result.lambdas.append(lam)

    result.x = best_x
    result.ratio = ratio(best_x)
    return result
