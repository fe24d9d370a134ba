"""
자체 점검 모음

pytest 없이 실행 환경에서 핵심 성질(폐형식↔수치 적분 일치, 대칭성, 단조성/볼록성,
다이버시티 차수 스케일링, 디스패처 연속성, 표본 통계)을 점검합니다.
"""
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from models.channel_model import ChannelModel
from models.harq_config import HarqConfig
from . import beckmann_channel as channel
from . import g_kernel
from .outage_analyzer import outage_asymptotic

logger = logging.getLogger(__name__)

LOS_MEAN = (1 + 1j) / math.sqrt(2)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    elapsed_s: float = 0.0


@dataclass
class SelftestReport:
    results: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def summary(self) -> str:
        lines = [f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail} ({r.elapsed_s:.1f}s)"
                 for r in self.results]
        failed = sum(1 for r in self.results if not r.passed)
        lines.append(f"{len(self.results)} 개 중 {len(self.results) - failed} 개 통과")
        return '\n'.join(lines)


def reference_model(K: int = 2, rho: float = 0.8) -> ChannelModel:
    """h̄_k = (1+i)/√2, 지수 상관 ρ 모델"""
    return channel.build_exponential_model(K, rho, [LOS_MEAN] * K)


def random_distinct_rates(rng: np.random.Generator, K: int, low: float = 0.5, high: float = 8.0,
                          min_gap: float = 0.05) -> np.ndarray:
    """쌍별 간격이 min_gap 보다 큰 균등 분포 전송률 벡터"""
    while True:
        rates = rng.uniform(low, high, K)
        if K == 1 or np.min(np.diff(np.sort(rates))) > min_gap:
            return rates


class Selftest:
    """자체 점검 실행기"""

    SUITES = ('g-oracle', 'symmetry', 'convexity', 'scaling', 'dispatch', 'sampler')

    def __init__(self, seed: int = 2024, oracle_samples: int = 200, sampler_draws: int = 200_000,
                 inject_delta_eq_zero: bool = False, model: Optional[ChannelModel] = None):
        self.rng = np.random.default_rng(seed)
        self.oracle_samples = oracle_samples
        self.sampler_draws = sampler_draws
        self.model = model
        if inject_delta_eq_zero:
            self.g_dispatch: Callable[[Sequence[float]], float] = \
                lambda rates: g_kernel.g(rates, delta_eq=0.0, guard_cancellation=False)
        else:
            self.g_dispatch = g_kernel.g

    def run(self, suites: Optional[Sequence[str]] = None) -> SelftestReport:
        suites = list(suites) if suites else list(self.SUITES)
        unknown = [name for name in suites if name not in self.SUITES]
        if unknown:
            raise ValueError(f"알 수 없는 점검 모음입니다: {unknown} (가능: {list(self.SUITES)})")

        report = SelftestReport()
        for name in suites:
            method = getattr(self, 'suite_' + name.replace('-', '_'))
            start = time.perf_counter()
            try:
                passed, detail = method()
            except Exception as e:
                passed, detail = False, f"예외 발생: {e}"
            result = SuiteResult(name, passed, detail, time.perf_counter() - start)
            log = logger.info if passed else logger.error
            log(f"자체 점검 {name}: {'통과' if passed else '실패'} - {detail}")
            report.results.append(result)
        return report

    def suite_g_oracle(self):
        worst = 0.0
        for i in range(self.oracle_samples):
            rates = random_distinct_rates(self.rng, 2 + i % 4)
            numeric = g_kernel.g_numeric(rates, rel_tol=1e-9)
            worst = max(worst, abs(g_kernel.g_closed(rates) - numeric) / numeric)
        worst_det = 0.0
        for K in (2, 3, 4):
            for _ in range(20):
                rates = random_distinct_rates(self.rng, K)
                closed = g_kernel.g_closed(rates)
                worst_det = max(worst_det, abs(g_kernel.g_determinant(rates) - closed) / abs(closed))
        passed = worst < 1e-6 and worst_det < 1e-9
        return passed, f"폐형식↔수치 최대 상대오차 {worst:.2e}, 행렬식↔부분분수 {worst_det:.2e}"

    def suite_symmetry(self):
        worst_closed = 0.0
        worst_numeric = 0.0
        for K in (2, 3, 4):
            rates = random_distinct_rates(self.rng, K)
            reference = g_kernel.g_closed(rates)
            numeric_reference = g_kernel.g_numeric(rates, rel_tol=1e-9)
            for perm in itertools.permutations(range(K)):
                permuted = rates[list(perm)]
                worst_closed = max(worst_closed, abs(g_kernel.g_closed(permuted) - reference) / reference)
                worst_numeric = max(worst_numeric,
                                    abs(g_kernel.g_numeric(permuted, rel_tol=1e-9) - numeric_reference) / reference)
        passed = worst_closed < 1e-12 and worst_numeric < 1e-7
        return passed, f"순열 불변 오차: 폐형식 {worst_closed:.2e}, 수치 {worst_numeric:.2e}"

    def suite_convexity(self, points: int = 100, step: float = 1e-2):
        violations = 0
        for i in range(points):
            K = 1 + i % 4
            rates = random_distinct_rates(self.rng, K, min_gap=0.1)
            for t in range(K):
                up, down = rates.copy(), rates.copy()
                up[t] += step
                down[t] -= step
                center = self.g_dispatch(rates)
                plus, minus = self.g_dispatch(up), self.g_dispatch(down)
                if not (plus - minus > 0 and plus - 2 * center + minus >= -1e-8 * center):
                    violations += 1
        return violations == 0, f"{points} 점에서 단조/볼록 위반 {violations} 건"

    def suite_scaling(self, alpha: float = 10.0):
        model = reference_model(4)
        config = HarqConfig.constant_power([4.0, 3.5, 5.0, 4.5], 10 ** 2.5)
        scaled = HarqConfig(rates=config.rates, snr_linear=alpha * config.snr_linear)
        worst = 0.0
        for k in range(1, 5):
            base = outage_asymptotic(model, config, k)
            worst = max(worst, abs(outage_asymptotic(model, scaled, k) - alpha ** (-k) * base) / (alpha ** (-k) * base))
        return worst < 1e-12, f"γ→αγ 스케일링 최대 상대오차 {worst:.2e}"

    def suite_dispatch(self):
        worst = 0.0
        for base in (1.0, 3.0, 4.0, 8.0):
            for gap in (1e-13, 1e-12, 1e-9, 1e-7, 1.5e-6, 1e-5):
                for K in (2, 3):
                    rates = base * (1.0 + gap * np.arange(K))
                    reference = g_kernel.g_numeric(rates, rel_tol=1e-10)
                    worst = max(worst, abs(self.g_dispatch(rates) - reference) / reference)
        return worst < 1e-6, f"전환 경계 부근 최대 상대오차 {worst:.2e}"

    def suite_sampler(self):
        model = self.model if self.model is not None else reference_model(2)
        n = self.sampler_draws
        h = channel.sample(model, n, seed=12345, stream=0)
        centered = h - model.mean
        checks = []

        checks.append(self._within(h, model.mean, 5.0))
        covariance_terms = centered[:, :, None] * centered[:, None, :].conj()
        checks.append(self._within(covariance_terms, model.covariance, 5.0))
        relation_terms = centered[:, :, None] * centered[:, None, :]
        checks.append(self._within(relation_terms, model.relation, 5.0))

        mass = self._normalization(channel.build_exponential_model(1, 0.5, [0.3 + 0.2j]))
        passed = all(ok for ok, _ in checks) and abs(mass - 1.0) < 1e-3
        worst = max(score for _, score in checks)
        return passed, f"표본 통계 최대 {worst:.2f} 표준오차, K=1 밀도 적분 {mass:.6f}"

    @staticmethod
    def _within(samples: np.ndarray, expected: np.ndarray, limit: float):
        """표본 평균이 기대값과 항목별로 limit 표준오차 이내인지 (실수부/허수부 각각)"""
        n = samples.shape[0]
        worst = 0.0
        for part in (np.real, np.imag):
            values = part(samples)
            stderr = np.std(values, axis=0) / math.sqrt(n)
            deviation = np.abs(np.mean(values, axis=0) - part(expected))
            scores = np.where(stderr > 0, deviation / np.where(stderr > 0, stderr, 1.0),
                              np.where(deviation > 1e-12, np.inf, 0.0))
            worst = max(worst, float(np.max(scores)))
        return worst <= limit, worst

    @staticmethod
    def _normalization(model: ChannelModel, points: int = 801) -> float:
        """K=1 밀도를 평균 중심 ±8σ 정사각형에서 사다리꼴 적분"""
        V = channel.real_covariance(model)
        sigma = math.sqrt(float(np.max(np.linalg.eigvalsh(V))))
        center = channel.real_mean(model)
        xs = np.linspace(center[0] - 8 * sigma, center[0] + 8 * sigma, points)
        ys = np.linspace(center[1] - 8 * sigma, center[1] + 8 * sigma, points)
        X, Y = np.meshgrid(xs, ys, indexing='ij')
        h = (X + 1j * Y).reshape(-1, 1)
        density = np.exp(channel.log_density(model, h)).reshape(X.shape)
        return float(trapezoid(trapezoid(density, ys, axis=1), xs))


def run_selftest(suites: Optional[Sequence[str]] = None, inject_delta_eq_zero: bool = False,
                 model: Optional[ChannelModel] = None) -> SelftestReport:
    return Selftest(inject_delta_eq_zero=inject_delta_eq_zero, model=model).run(suites)
