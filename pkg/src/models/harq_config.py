"""
가변 전송률 HARQ-IR 설정 및 아웃티지 추정 결과 타입
"""
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class HarqConfig:
    """라운드별 전송률 R_k (bits/s/Hz) 와 송신 SNR γ_k = P_k/N₀ (선형)"""
    rates: np.ndarray
    snr_linear: np.ndarray

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float).reshape(-1)
        snr = np.array(self.snr_linear, dtype=float).reshape(-1)
        if rates.shape != snr.shape:
            raise ValueError(f"전송률과 SNR 벡터 길이가 다릅니다: {rates.shape[0]} != {snr.shape[0]}")
        if rates.size == 0:
            raise ValueError("라운드 수 K 는 1 이상이어야 합니다")
        if not np.all(rates > 0) or not np.all(np.isfinite(rates)):
            raise ValueError(f"전송률은 모두 양수여야 합니다: {rates.tolist()}")
        if not np.all(snr > 0) or not np.all(np.isfinite(snr)):
            raise ValueError(f"SNR 은 모두 양수여야 합니다: {snr.tolist()}")
        rates.setflags(write=False)
        snr.setflags(write=False)
        object.__setattr__(self, 'rates', rates)
        object.__setattr__(self, 'snr_linear', snr)

    @property
    def K(self) -> int:
        return int(self.rates.shape[0])

    @classmethod
    def constant_power(cls, rates: Iterable[float], snr_linear: float) -> 'HarqConfig':
        """모든 라운드에 같은 송신 SNR 을 쓰는 설정"""
        rates = np.asarray(list(rates), dtype=float)
        return cls(rates=rates, snr_linear=np.full(rates.shape, float(snr_linear)))


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo 아웃티지 확률 추정치"""
    value: float
    stderr: float
    n: int
    count: int

    @classmethod
    def from_counts(cls, count: int, n: int) -> 'OutageEstimate':
        if n < 1:
            raise ValueError(f"표본 수는 1 이상이어야 합니다: {n}")
        value = count / n
        return cls(value=value, stderr=math.sqrt(value * (1.0 - value) / n), n=n, count=int(count))
