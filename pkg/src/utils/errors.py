"""
예외 계층 모듈

모든 예외는 HarqBeckError 에서 파생되며, CLI 는 예외 종류에 따라 종료 코드를 결정합니다.
"""
from typing import Optional


class HarqBeckError(Exception):
    """패키지 공통 예외"""


class ConfigValidationError(HarqBeckError, ValueError):
    """실험 설정 검증 오류 (필드 경로 포함)"""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class ModelValidationError(HarqBeckError, ValueError):
    """채널 모델 차원 불일치 또는 실수 공분산 V 가 양반정부호가 아닌 경우"""


class FactorizationError(HarqBeckError):
    """지터를 늘려도 Cholesky 분해에 실패한 경우"""


class SingularCovarianceError(HarqBeckError):
    """V 가 특이 행렬이라 밀도가 정의되지 않는 경우"""


class PreconditionError(HarqBeckError, ValueError):
    """연산의 사전 조건 위반 (근접한 전송률, 격자 탐색 K 제한 등)"""


class ConvergenceError(HarqBeckError):
    """반복 계산이 최대 깊이 안에 수렴하지 않은 경우"""

    def __init__(self, message: str, best_estimate: Optional[float] = None):
        self.best_estimate = best_estimate
        super().__init__(message)


class InfeasibleError(HarqBeckError):
    """불능 제약 조건 오류"""


class NumericalError(HarqBeckError):
    """목적 함수 값이 유한하지 않은 경우"""
