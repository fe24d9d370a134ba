"""
전송률 최적화 문제와 결과 타입
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from models.channel_model import ChannelModel
from utils.errors import PreconditionError

DEFAULT_RATE_BOUNDS = (0.1, 16.0)
# 실현 가능 판정 시 ε 에 허용하는 상대 여유
FEASIBILITY_RTOL = 1e-9


@dataclass
class RateOptProblem:
    """아웃티지 제약 p_out,K ≤ ε 하의 LTAT 최대화 문제"""
    model: ChannelModel
    snr_linear: np.ndarray
    epsilon: float
    rate_bounds: Tuple[float, float] = DEFAULT_RATE_BOUNDS
    tol_rate: float = 1e-6
    tol_ltat: float = 1e-6
    max_outer: int = 50
    max_dinkelbach: int = 30

    def __post_init__(self):
        self.snr_linear = np.asarray(self.snr_linear, dtype=float).reshape(-1)
        if self.snr_linear.shape[0] != self.model.K:
            raise PreconditionError(
                f"SNR 벡터 길이 {self.snr_linear.shape[0]} 가 K={self.model.K} 와 다릅니다")
        if not np.all(self.snr_linear > 0):
            raise PreconditionError(f"SNR 은 모두 양수여야 합니다: {self.snr_linear.tolist()}")
        if not (0.0 < self.epsilon < 1.0):
            raise PreconditionError(f"아웃티지 임계값 ε 는 (0, 1) 범위여야 합니다: {self.epsilon}")
        low, high = self.rate_bounds
        if not (0.0 < low < high):
            raise PreconditionError(f"전송률 범위는 0 < R_lo < R_hi 여야 합니다: {self.rate_bounds}")
        self.rate_bounds = (float(low), float(high))
        if self.tol_rate <= 0 or self.tol_ltat <= 0:
            raise PreconditionError(f"허용 오차는 양수여야 합니다: {self.tol_rate}, {self.tol_ltat}")
        if self.max_outer < 1 or self.max_dinkelbach < 1:
            raise PreconditionError(f"반복 상한은 1 이상이어야 합니다: {self.max_outer}, {self.max_dinkelbach}")

    @property
    def K(self) -> int:
        return self.model.K

    @property
    def outage_limit(self) -> float:
        return self.epsilon * (1.0 + FEASIBILITY_RTOL)


@dataclass
class IterationRecord:
    """외부 반복 한 번의 기록"""
    iteration: int
    rates: List[float]
    ltat: float


@dataclass
class RateOptResult:
    """최적화 결과"""
    rates: List[float]
    ltat: float
    outage: float
    feasible: bool
    outer_iterations: int = 0
    trace: List[IterationRecord] = field(default_factory=list)
    method: str = ''
    message: Optional[str] = None
