"""
g_K 커널 모듈

g_K(R_1..R_K) 는 영역 Σ (1/R_k)·log₂(1+t_k) < 1 의 부피입니다.
서로 다른 전송률에는 부분분수 폐형식을, 같거나 근접한 전송률에는 단체(simplex)
위의 반복 Gauss-Legendre 적분을 사용합니다.
"""
import logging
import math
from typing import Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, PreconditionError

logger = logging.getLogger(__name__)

# 폐형식을 허용하는 최소 상대 전송률 간격
DELTA_EQ = 1e-6
# 폐형식의 상쇄 오차 추정치가 이 값을 넘으면 수치 적분으로 전환
CANCELLATION_LIMIT = 1e-10
DEFAULT_REL_TOL = 1e-8
GAUSS_ORDER = 8
MAX_DEPTH = 12
# 한 번에 평가하는 최내곽 적분점 수 상한 (메모리 제한)
_CHUNK_BUDGET = 1 << 20

LN2 = math.log(2.0)


def _as_rates(rates: Sequence[float]) -> np.ndarray:
    rates = np.asarray(rates, dtype=float).reshape(-1)
    if rates.size == 0:
        raise PreconditionError("전송률 벡터가 비어 있습니다")
    if not np.all(rates > 0) or not np.all(np.isfinite(rates)):
        raise PreconditionError(f"전송률은 모두 양의 유한값이어야 합니다: {rates.tolist()}")
    return rates


def min_relative_gap(rates: Sequence[float]) -> float:
    """서로 다른 두 전송률 사이의 최소 상대 간격 |R_i - R_j| / max(R_i, R_j)"""
    rates = np.asarray(rates, dtype=float).reshape(-1)
    if rates.size < 2:
        return math.inf
    ordered = np.sort(rates)
    gaps = np.diff(ordered) / ordered[1:]
    return float(np.min(gaps))


def _partial_fraction_terms(rates: np.ndarray) -> np.ndarray:
    """2^{R_p} / Π_{k≠p} ((R_p - R_k)/R_k) 항들"""
    K = rates.size
    terms = np.empty(K)
    for p in range(K):
        others = np.delete(rates, p)
        terms[p] = np.exp2(rates[p]) / np.prod((rates[p] - others) / others)
    return terms


def g_closed(rates: Sequence[float], delta_eq: float = DELTA_EQ) -> float:
    """
    부분분수 폐형식 (-1)^K + Σ_p 2^{R_p} / Π_{k≠p} ((R_p - R_k)/R_k)

    Args:
        rates: 서로 다른 전송률 벡터
        delta_eq: 허용 최소 상대 간격

    Returns:
        float: g_K 값
    """
    rates = _as_rates(rates)
    gap = min_relative_gap(rates)
    if gap <= delta_eq:
        raise PreconditionError(
            f"전송률 상대 간격 {gap:.3e} 가 {delta_eq:.0e} 이하라 폐형식이 불안정합니다. g_numeric 을 사용하세요")
    return float((-1) ** rates.size + np.sum(_partial_fraction_terms(rates)))


def g_determinant(rates: Sequence[float]) -> float:
    """
    Vandermonde 행렬식 형태 (-1)^K + det(A)/det(B)

    A 의 p 행은 (R_p, R_p², ..., R_p^{K-1}, 2^{R_p}), B 는 Vandermonde 행렬입니다.
    교차 검증 용도입니다.
    """
    rates = _as_rates(rates)
    K = rates.size
    powers = np.vander(rates, K, increasing=True)
    A = np.column_stack([powers[:, 1:], np.exp2(rates)])
    B = powers
    return float((-1) ** K + np.linalg.det(A) / np.linalg.det(B))


def _composite_rule(depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """[0, 1] 을 2^depth 구간으로 나눈 복합 Gauss-Legendre 노드와 가중치"""
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    panels = 1 << depth
    offsets = np.arange(panels)[:, None]
    x = ((offsets + 0.5 * (nodes + 1.0)) / panels).ravel()
    w = np.tile(weights / (2.0 * panels), panels)
    return x, w


def _simplex_integral(a: np.ndarray, s: np.ndarray, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """
    F(s) = ∫_{u ≥ 0, Σu < s} Π_k e^{a_k u_k} du 를 s 배열에 대해 계산

    첫 좌표를 u = s·x 로 적분하고 나머지는 재귀적으로 s - u 에 대해 계산합니다.
    마지막 좌표는 (e^{a s} - 1)/a 로 정확히 적분합니다.
    """
    if a.size == 1:
        return np.expm1(a[0] * s) / a[0]

    inner_points = x.size ** (a.size - 1)
    if s.size > 1 and s.size * inner_points > _CHUNK_BUDGET:
        chunks = max(2, (s.size * inner_points) // _CHUNK_BUDGET + 1)
        return np.concatenate([_simplex_integral(a, part, x, w)
                               for part in np.array_split(s, min(chunks, s.size))])

    u = np.multiply.outer(s, x)
    inner = _simplex_integral(a[1:], (s[:, None] - u).ravel(), x, w).reshape(u.shape)
    return np.sum(s[:, None] * w * np.exp(a[0] * u) * inner, axis=1)


def g_numeric(rates: Sequence[float], rel_tol: float = DEFAULT_REL_TOL, max_depth: int = MAX_DEPTH) -> float:
    """
    단체 위 수치 적분으로 g_K 계산

    u_k = log₂(1+t_k)/R_k 치환으로 g_K = (Π R_k ln2)·∫_Δ Π 2^{R_k u_k} du 이며,
    구간을 2배씩 나누며 연속 추정치의 상대 변화가 rel_tol 미만이 될 때까지 반복합니다.

    Args:
        rates: 전송률 벡터 (같은 값 허용)
        rel_tol: 상대 허용 오차 (0, 1e-2]
        max_depth: 최대 분할 깊이

    Returns:
        float: g_K 값
    """
    rates = _as_rates(rates)
    if not (0.0 < rel_tol <= 1e-2):
        raise PreconditionError(f"rel_tol 은 (0, 1e-2] 범위여야 합니다: {rel_tol}")

    a = rates * LN2
    scale = float(np.prod(a))
    s0 = np.ones(1)

    x, w = _composite_rule(0)
    previous = scale * float(_simplex_integral(a, s0, x, w)[0])
    for depth in range(1, max_depth + 1):
        x, w = _composite_rule(depth)
        current = scale * float(_simplex_integral(a, s0, x, w)[0])
        change = abs(current - previous) / abs(current)
        logger.debug(f"g_numeric 깊이 {depth}: {current:.15g} (상대 변화 {change:.2e})")
        if change < rel_tol:
            return current
        previous = current

    raise ConvergenceError(
        f"g_numeric 이 깊이 {max_depth} 안에 수렴하지 않았습니다 (rates={rates.tolist()})",
        best_estimate=previous)


def g(rates: Sequence[float], delta_eq: float = DELTA_EQ, guard_cancellation: bool = True) -> float:
    """
    g_K 디스패처

    최소 상대 간격이 delta_eq 보다 크면 폐형식, 아니면 rel_tol=1e-8 수치 적분을 사용합니다.
    폐형식 항들의 상쇄 오차 추정치가 CANCELLATION_LIMIT 을 넘는 경우에도 수치 적분으로 보냅니다.
    """
    rates = _as_rates(rates)
    if rates.size == 1:
        return float(np.expm1(rates[0] * LN2))

    if min_relative_gap(rates) > delta_eq:
        terms = _partial_fraction_terms(rates)
        value = float((-1) ** rates.size + np.sum(terms))
        if not guard_cancellation:
            return value
        cancellation = np.finfo(float).eps * rates.size * float(np.sum(np.abs(terms)))
        if value > 0 and cancellation <= CANCELLATION_LIMIT * value:
            return value
        logger.debug(f"폐형식 상쇄 오차가 커서 수치 적분으로 전환합니다 (rates={rates.tolist()})")

    return g_numeric(rates, rel_tol=DEFAULT_REL_TOL)
