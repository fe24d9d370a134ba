"""
아웃티지 확률 및 LTAT 분석 모듈

- 누적 상호정보량과 Monte Carlo 아웃티지 추정
- 고 SNR 점근 아웃티지 π^k·f_h(0)·Π(1/γ_j)·g_k
- 장기 평균 처리율(LTAT)
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np

from models.channel_model import ChannelModel
from models.harq_config import HarqConfig, OutageEstimate
from . import beckmann_channel as channel
from . import g_kernel

logger = logging.getLogger(__name__)

ASYMPTOTIC = 'asymptotic'
MONTE_CARLO = 'monte_carlo'


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def linear_to_db(snr_linear: float) -> float:
    return 10.0 * math.log10(snr_linear)


def _check_round(k: int, K: int):
    if not (1 <= k <= K):
        raise ValueError(f"라운드 인덱스 k 는 1..{K} 범위여야 합니다: {k}")


def accumulated_info(config: HarqConfig, h, k: int):
    """
    정규화 누적 상호정보량 Σ_{j≤k} (1/R_j)·log₂(1 + γ_j|h_j|²)

    결과가 1 미만이면 k 라운드 후 아웃티지입니다. h 는 (K,) 또는 (n, K) 배열입니다.
    """
    _check_round(k, config.K)
    h = np.asarray(h, dtype=complex)
    gains = np.abs(h[..., :k]) ** 2
    info = np.sum(np.log2(1.0 + config.snr_linear[:k] * gains) / config.rates[:k], axis=-1)
    return float(info) if np.ndim(info) == 0 else info


def _count_block(form, config: HarqConfig, n: int, seed: int, stream: int, block: int) -> np.ndarray:
    h = channel.sample_block(form, n, seed, stream, block)
    per_round = np.log2(1.0 + config.snr_linear * np.abs(h) ** 2) / config.rates
    cumulative = np.cumsum(per_round, axis=1)
    return np.sum(cumulative < 1.0, axis=0)


def outage_mc_profile(model: ChannelModel, config: HarqConfig, n: int, seed: int = 0,
                      stream: int = 0, shards: int = 1) -> List[OutageEstimate]:
    """
    한 표본 집합으로 k = 1..K 전체 아웃티지를 추정

    표본은 (seed, stream, block) 키의 고정 크기 블록으로 생성되며, 블록들을 shards 개
    스레드에 나눠 계산한 뒤 카운트를 합산하므로 결과는 shards 에 무관합니다.

    Args:
        model: 채널 모델
        config: HARQ 설정 (config.K == model.K)
        n: 표본 수
        seed: 시드
        stream: 스트림 인덱스
        shards: 병렬 샤드 수

    Returns:
        List[OutageEstimate]: 라운드별 추정치
    """
    if n < 1:
        raise ValueError(f"표본 수는 1 이상이어야 합니다: {n}")
    if config.K != model.K:
        raise ValueError(f"HARQ 라운드 수 {config.K} 와 채널 차원 {model.K} 가 다릅니다")
    form = channel.real_form(model)
    blocks = range(channel.block_count(n))

    def count(block: int) -> np.ndarray:
        return _count_block(form, config, n, seed, stream, block)

    if shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            partial = list(pool.map(count, blocks))
    else:
        partial = [count(b) for b in blocks]

    totals = np.sum(partial, axis=0)
    logger.debug(f"MC 아웃티지 카운트 {totals.tolist()} / {n} (seed={seed}, stream={stream})")
    return [OutageEstimate.from_counts(int(c), n) for c in totals]


def outage_mc(model: ChannelModel, config: HarqConfig, k: int, n: int, seed: int = 0,
              stream: int = 0, shards: int = 1) -> OutageEstimate:
    """k 라운드 후 Monte Carlo 아웃티지 확률 (엄격 부등식 누적정보 < 1)"""
    _check_round(k, config.K)
    return outage_mc_profile(model, config, n, seed, stream, shards)[k - 1]


class AsymptoticOutage:
    """
    채널 모델과 SNR 이 고정된 점근 아웃티지 평가기

    라운드별 상수 c_k = π^k·f_{h_k}(0)·Π_{j≤k} 1/γ_j 를 미리 계산해 두고
    전송률만 바꿔 가며 p_k = c_k·g(R_1..R_k) 를 계산합니다 (최적화기에서 반복 사용).
    """

    def __init__(self, model: ChannelModel, snr_linear: Sequence[float],
                 g_function: Callable[[Sequence[float]], float] = g_kernel.g):
        snr = np.asarray(snr_linear, dtype=float).reshape(-1)
        if snr.shape[0] != model.K:
            raise ValueError(f"SNR 벡터 길이 {snr.shape[0]} 가 K={model.K} 와 다릅니다")
        if not np.all(snr > 0):
            raise ValueError(f"SNR 은 모두 양수여야 합니다: {snr.tolist()}")
        self.model = model
        self.snr_linear = snr
        self.g_function = g_function
        self.constants = np.array([
            math.pi ** k * channel.density_at_zero(channel.restrict(model, k)) * float(np.prod(1.0 / snr[:k]))
            for k in range(1, model.K + 1)
        ])

    @property
    def K(self) -> int:
        return self.model.K

    def outage(self, rates: Sequence[float], k: Optional[int] = None) -> float:
        """k 라운드 후 점근 아웃티지 (원값, 1 로 자르지 않음)"""
        k = self.K if k is None else k
        _check_round(k, self.K)
        return float(self.constants[k - 1] * self.g_function(np.asarray(rates, dtype=float)[:k]))

    def profile(self, rates: Sequence[float]) -> np.ndarray:
        rates = np.asarray(rates, dtype=float)
        return np.array([self.outage(rates, k) for k in range(1, self.K + 1)])

    def ltat(self, rates: Sequence[float]) -> float:
        return ltat_from_outages(rates, np.clip(self.profile(rates), 0.0, 1.0))


def outage_asymptotic(model: ChannelModel, config: HarqConfig, k: int) -> float:
    """
    점근 아웃티지 π^k·f_{h_k}(0)·Π_{j≤k}(1/γ_j)·g(R_1..R_k)

    f_{h_k}(0) 는 처음 k 라운드로 제한한 모델의 원점 밀도입니다. 1 로 자르지 않은 원값을 반환합니다.
    """
    _check_round(k, config.K)
    return AsymptoticOutage(model, config.snr_linear).outage(config.rates, k)


def outage_asymptotic_profile(model: ChannelModel, config: HarqConfig) -> List[float]:
    return AsymptoticOutage(model, config.snr_linear).profile(config.rates).tolist()


def ltat_from_outages(rates: Sequence[float], p_out: Sequence[float]) -> float:
    """
    T = (1 - p_K) / Σ_{k=1..K} (1/R_k)·p_{k-1}, p_0 = 1

    Args:
        rates: 라운드별 전송률
        p_out: 라운드별 아웃티지 확률 p_1..p_K

    Returns:
        float: LTAT (bits/s/Hz)
    """
    rates = np.asarray(rates, dtype=float).reshape(-1)
    p_out = np.asarray(p_out, dtype=float).reshape(-1)
    if rates.shape != p_out.shape:
        raise ValueError(f"전송률과 아웃티지 벡터 길이가 다릅니다: {rates.size} != {p_out.size}")
    previous = np.concatenate([[1.0], p_out[:-1]])
    return float((1.0 - p_out[-1]) / np.sum(previous / rates))


def ltat(model: ChannelModel, config: HarqConfig, mode: str = ASYMPTOTIC, n: int = 100_000,
         seed: int = 0, stream: int = 0, shards: int = 1) -> float:
    """
    LTAT 계산

    mode 가 'asymptotic' 이면 점근 아웃티지를 [0, 1] 로 자른 뒤 사용하고,
    'monte_carlo' 이면 같은 표본 집합의 라운드별 추정치를 사용합니다.
    """
    if mode == ASYMPTOTIC:
        p_out = np.clip(outage_asymptotic_profile(model, config), 0.0, 1.0)
    elif mode == MONTE_CARLO:
        p_out = [e.value for e in outage_mc_profile(model, config, n, seed, stream, shards)]
    else:
        raise ValueError(f"지원하지 않는 LTAT 모드입니다: {mode}")
    return ltat_from_outages(config.rates, p_out)


def empirical_diversity_order(snr_db: Sequence[float], p_out: Sequence[float]) -> float:
    """가장 높은 두 SNR 점에서 log p_out 대 log γ 기울기의 음수 (다이버시티 차수 추정)"""
    if len(snr_db) < 2 or len(snr_db) != len(p_out):
        raise ValueError("SNR 과 아웃티지 값이 같은 길이로 2개 이상 필요합니다")
    (x1, y1), (x2, y2) = sorted(zip(snr_db, p_out))[-2:]
    if y1 <= 0 or y2 <= 0:
        raise ValueError(f"아웃티지 값은 양수여야 합니다: {y1}, {y2}")
    return -(math.log(y2) - math.log(y1)) / (math.log(db_to_linear(x2)) - math.log(db_to_linear(x1)))
