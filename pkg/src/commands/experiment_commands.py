"""
실험 명령 (outage / ltat / optimize / selftest)

각 명령은 ExperimentConfig 를 받아 SNR 목록을 훑으며 SweepReport 행을 만듭니다.
"""
import logging
import time
from typing import List, Optional, Sequence

import numpy as np

from models.experiment_config import ExperimentConfig, MonteCarloSpec
from models.harq_config import HarqConfig
from models.rate_optimization import RateOptProblem, RateOptResult
from models.sweep_report import (LTAT_COLUMNS, OPTIMIZE_COLUMNS, OUTAGE_COLUMNS, SELFTEST_COLUMNS,
                                 SweepReport)
from utils.errors import ConfigValidationError
from utils.outage_analyzer import (AsymptoticOutage, db_to_linear, ltat_from_outages,
                                   outage_mc_profile)
from utils.rate_optimizer import optimize_alternating, optimize_fixed_rate, optimize_grid
from utils.selftest import run_selftest
from .base_command import Command

logger = logging.getLogger(__name__)


class ExperimentCommand(Command):
    """설정 기반 명령 공통 부분"""

    name = ''

    def __init__(self, config: ExperimentConfig, streams: int = 1, timing: bool = False):
        if streams < 1:
            raise ValueError(f"--streams 는 1 이상이어야 합니다: {streams}")
        self.config = config
        self.streams = streams
        self.timing = timing
        self._started = 0.0

    def get_description(self) -> str:
        channel = self.config.channel
        return (f"{self.name}: {channel.kind} K={channel.K}, "
                f"SNR {len(self.config.harq.snr_db)} 점")

    def _start_timer(self):
        self._started = time.perf_counter()

    def _runtime_ms(self) -> int:
        # 기본값 0: 같은 설정이면 출력이 바이트 단위로 같음
        if not self.timing:
            return 0
        return int(round((time.perf_counter() - self._started) * 1000.0))

    def _harq(self, snr_db: float) -> HarqConfig:
        return HarqConfig.constant_power(self.config.harq.rates, db_to_linear(snr_db))


class OutageCommand(ExperimentCommand):
    """SNR 별 라운드 k = 1..K 의 MC/점근 아웃티지"""

    name = 'outage'

    def execute(self) -> SweepReport:
        model = self.config.channel.build()
        mc = self.config.mc or MonteCarloSpec()
        report = SweepReport(self.name, OUTAGE_COLUMNS)

        for snr_db in self.config.harq.snr_db:
            self._start_timer()
            harq = self._harq(snr_db)
            estimates = outage_mc_profile(model, harq, mc.n, seed=mc.seed, shards=self.streams)
            asymptotic = AsymptoticOutage(model, harq.snr_linear).profile(harq.rates)
            runtime = self._runtime_ms()
            for k, (estimate, p_asy) in enumerate(zip(estimates, asymptotic), 1):
                report.add_row(snr_db=snr_db, k=k, p_out_mc=estimate.value,
                               p_out_mc_stderr=estimate.stderr, p_out_asy=float(p_asy),
                               runtime_ms=runtime)
            logger.info(f"SNR {snr_db:g} dB: p_out,K MC={estimates[-1].value:.4e}, 점근={asymptotic[-1]:.4e}")
        return report


class LtatCommand(ExperimentCommand):
    """SNR 별 LTAT (점근, mc 블록이 있으면 MC 도)"""

    name = 'ltat'

    def execute(self) -> SweepReport:
        model = self.config.channel.build()
        mc = self.config.mc
        report = SweepReport(self.name, LTAT_COLUMNS)

        for snr_db in self.config.harq.snr_db:
            self._start_timer()
            harq = self._harq(snr_db)
            profile = AsymptoticOutage(model, harq.snr_linear).profile(harq.rates)
            ltat_asy = ltat_from_outages(harq.rates, np.clip(profile, 0.0, 1.0))
            ltat_mc = None
            if mc is not None:
                estimates = outage_mc_profile(model, harq, mc.n, seed=mc.seed, shards=self.streams)
                ltat_mc = ltat_from_outages(harq.rates, [e.value for e in estimates])
            report.add_row(snr_db=snr_db, k=harq.K, p_out_asy=float(profile[-1]), ltat_asy=ltat_asy,
                           ltat_mc=ltat_mc, runtime_ms=self._runtime_ms())
            logger.info(f"SNR {snr_db:g} dB: LTAT 점근={ltat_asy:.6f}"
                        + (f", MC={ltat_mc:.6f}" if ltat_mc is not None else ""))
        return report


class OptimizeCommand(ExperimentCommand):
    """SNR·ε 별 가변 전송률 / 고정 전송률 (/ 격자) LTAT 최적화"""

    name = 'optimize'

    def __init__(self, config: ExperimentConfig, streams: int = 1, timing: bool = False,
                 grid_check: bool = False):
        super().__init__(config, streams, timing)
        if config.optimize is None:
            raise ConfigValidationError('optimize', "optimize 명령에는 optimize 블록이 필요합니다")
        self.grid_check = grid_check

    def get_description(self) -> str:
        return (super().get_description()
                + f", ε {len(self.config.optimize.epsilon)} 개" + (", 격자 검증" if self.grid_check else ""))

    def _problem(self, model, snr_linear: np.ndarray, epsilon: float) -> RateOptProblem:
        spec = self.config.optimize
        return RateOptProblem(model=model, snr_linear=snr_linear, epsilon=epsilon,
                              rate_bounds=tuple(spec.rate_bounds), tol_rate=spec.tol_rate,
                              tol_ltat=spec.tol_ltat, max_outer=spec.max_outer,
                              max_dinkelbach=spec.max_dinkelbach)

    def solve(self, problem: RateOptProblem, evaluator: AsymptoticOutage) -> List[Optional[RateOptResult]]:
        """(가변, 고정, 격자) 결과. 격자는 grid_check 일 때만"""
        initial = self.config.optimize.initial
        fixed = optimize_fixed_rate(problem, evaluator)
        if initial == 'warm' and fixed.feasible:
            initial = fixed.rates
        variable = optimize_alternating(problem, initial=initial, evaluator=evaluator)
        grid = None
        if self.grid_check:
            grid = optimize_grid(problem, self.config.optimize.grid_step, workers=self.streams,
                                 evaluator=evaluator)
        return [variable, fixed, grid]

    def execute(self) -> SweepReport:
        model = self.config.channel.build()
        report = SweepReport(self.name, OPTIMIZE_COLUMNS)

        for snr_db in self.config.harq.snr_db:
            snr_linear = self._harq(snr_db).snr_linear
            evaluator = AsymptoticOutage(model, snr_linear)
            for epsilon in self.config.optimize.epsilon:
                self._start_timer()
                variable, fixed, grid = self.solve(self._problem(model, snr_linear, epsilon), evaluator)
                if not variable.feasible:
                    logger.warning(f"SNR {snr_db:g} dB, ε={epsilon:g}: 실현 가능한 전송률이 없습니다")
                report.add_row(
                    snr_db=snr_db,
                    epsilon=epsilon,
                    feasible=variable.feasible,
                    ltat_variable=variable.ltat if variable.feasible else None,
                    ltat_fixed=fixed.ltat if fixed.feasible else None,
                    ltat_grid=grid.ltat if grid is not None and grid.feasible else None,
                    rates=variable.rates if variable.feasible else None,
                    rates_fixed=fixed.rates if fixed.feasible else None,
                    outage=variable.outage,
                    outer_iterations=variable.outer_iterations,
                    runtime_ms=self._runtime_ms(),
                )
        return report


class SelftestCommand(Command):
    """자체 점검 (설정이 있으면 그 채널로 표본 통계를 점검)"""

    name = 'selftest'

    def __init__(self, config: Optional[ExperimentConfig] = None, suites: Optional[Sequence[str]] = None,
                 inject_delta_eq_zero: bool = False):
        self.config = config
        self.suites = suites
        self.inject_delta_eq_zero = inject_delta_eq_zero
        self.summary = ''

    def get_description(self) -> str:
        suites = ', '.join(self.suites) if self.suites else '전체'
        return f"selftest: {suites}" + (" (δ_eq=0 주입)" if self.inject_delta_eq_zero else "")

    def execute(self) -> SweepReport:
        model = self.config.channel.build() if self.config is not None else None
        result = run_selftest(self.suites, self.inject_delta_eq_zero, model)
        self.summary = result.summary()
        report = SweepReport(self.name, SELFTEST_COLUMNS)
        for suite in result.results:
            report.add_row(suite=suite.name, passed=suite.passed, detail=suite.detail)
        return report


def cmd_outage(config: ExperimentConfig, streams: int = 1, timing: bool = False) -> SweepReport:
    return OutageCommand(config, streams, timing).execute()


def cmd_ltat(config: ExperimentConfig, streams: int = 1, timing: bool = False) -> SweepReport:
    return LtatCommand(config, streams, timing).execute()


def cmd_optimize(config: ExperimentConfig, streams: int = 1, timing: bool = False,
                 grid_check: bool = False) -> SweepReport:
    return OptimizeCommand(config, streams, timing, grid_check).execute()


def cmd_selftest(config: Optional[ExperimentConfig] = None, suites: Optional[Sequence[str]] = None,
                 inject_delta_eq_zero: bool = False) -> SweepReport:
    return SelftestCommand(config, suites, inject_delta_eq_zero).execute()


def selftest_passed(report: SweepReport) -> bool:
    return all(report.column('passed'))
