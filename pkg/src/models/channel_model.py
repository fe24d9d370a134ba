"""
Beckmann 채널 모델 데이터 타입

K 차원 비원형(non-circular) 복소 가우시안 채널 벡터 h 를
평균 h̄, 공분산 R = E[h̃h̃ᴴ], 관계 행렬 C = E[h̃h̃ᵀ] 로 표현합니다.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from utils.errors import ModelValidationError


def _frozen_array(values: Any, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


def complex_to_pairs(values: np.ndarray) -> Any:
    """복소 배열을 [re, im] 쌍의 중첩 리스트로 변환"""
    values = np.asarray(values)
    if values.ndim == 0:
        return [float(values.real), float(values.imag)]
    return [complex_to_pairs(v) for v in values]


def pairs_to_complex(data: Any, ndim: int) -> np.ndarray:
    """
    [re, im] 쌍 (또는 실수) 중첩 리스트를 복소 배열로 변환

    Args:
        data: 중첩 리스트
        ndim: 결과 배열 차원 (벡터 1, 행렬 2)

    Returns:
        np.ndarray: 복소 배열
    """

    def convert(node, depth):
        if depth == 0:
            if isinstance(node, bool):
                raise TypeError(f"복소수 항목이 아닙니다: {node!r}")
            if isinstance(node, (int, float)):
                return complex(node)
            if (isinstance(node, (list, tuple)) and len(node) == 2
                    and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in node)):
                return complex(node[0], node[1])
            raise TypeError(f"복소수 항목은 숫자 또는 [re, im] 이어야 합니다: {node!r}")
        if not isinstance(node, (list, tuple)):
            raise TypeError(f"리스트가 필요합니다: {node!r}")
        return [convert(child, depth - 1) for child in node]

    return np.array(convert(data, ndim), dtype=complex)


@dataclass(frozen=True)
class ChannelModel:
    """K 라운드 상관 Beckmann 채널 모델 (생성 후 불변)"""
    K: int
    mean: np.ndarray
    covariance: np.ndarray
    relation: np.ndarray

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ModelValidationError(f"K 는 양의 정수여야 합니다: {self.K}")
        mean = _frozen_array(self.mean, complex).reshape(-1)
        covariance = _frozen_array(self.covariance, complex)
        relation = _frozen_array(self.relation, complex)

        if mean.shape != (self.K,):
            raise ModelValidationError(f"평균 벡터 길이가 K={self.K} 와 다릅니다: {mean.shape}")
        for name, matrix in (('covariance', covariance), ('relation', relation)):
            if matrix.shape != (self.K, self.K):
                raise ModelValidationError(
                    f"{name} 행렬 크기가 {self.K}x{self.K} 가 아닙니다: {matrix.shape}")

        object.__setattr__(self, 'K', int(self.K))
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'covariance', covariance)
        object.__setattr__(self, 'relation', relation)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'K': self.K,
            'mean': complex_to_pairs(self.mean),
            'covariance': complex_to_pairs(self.covariance),
            'relation': complex_to_pairs(self.relation),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ChannelModel':
        return cls(
            K=data['K'],
            mean=pairs_to_complex(data['mean'], 1),
            covariance=pairs_to_complex(data['covariance'], 2),
            relation=pairs_to_complex(data['relation'], 2),
        )


@dataclass(frozen=True)
class RealGaussianForm:
    """(Re h; Im h) 의 2K 차원 실수 가우시안 표현"""
    mean_real: np.ndarray
    cov_real: np.ndarray
    factor: np.ndarray
    jitter: float = 0.0  # 분해에 실제로 더해진 대각 지터

    @property
    def dimension(self) -> int:
        return self.mean_real.shape[0]


@dataclass
class ValidationCheck:
    """검증 항목 하나의 결과"""
    name: str
    passed: bool
    detail: str
    value: Optional[float] = None


@dataclass
class ValidityReport:
    """validate() 가 반환하는 불변식별 통과/실패 보고서"""
    checks: List[ValidationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[ValidationCheck]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> ValidationCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def summary(self) -> str:
        if self.passed:
            return "모든 검증 통과"
        return "; ".join(f"{c.name}: {c.detail}" for c in self.failures)


def as_complex_vector(values: Sequence[Any]) -> np.ndarray:
    return np.asarray(values, dtype=complex).reshape(-1)
