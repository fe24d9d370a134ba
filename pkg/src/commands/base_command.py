import logging
import time
from abc import ABC, abstractmethod

from models.sweep_report import SweepReport

logger = logging.getLogger(__name__)


class Command(ABC):
    """명령 패턴의 기본 인터페이스 (CLI 하위 명령 하나당 하나)"""

    @abstractmethod
    def execute(self) -> SweepReport:
        """명령 실행"""
        pass

    @abstractmethod
    def get_description(self) -> str:
        """명령 설명 반환"""
        pass


def run_command(command: Command) -> SweepReport:
    """명령 실행 (시작/완료 로그와 소요 시간 기록)"""
    description = command.get_description()
    logger.info(f"명령 시작: {description}")
    start = time.perf_counter()
    report = command.execute()
    elapsed = time.perf_counter() - start
    logger.info(f"명령 완료: {description} ({len(report)} 행, {elapsed:.2f}s)")
    return report
