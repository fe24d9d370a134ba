"""
실험 설정 (JSON) 모듈

설정 파일은 channel / harq / mc / optimize / output 블록으로 구성되며,
알 수 없는 키는 거부하고 오류에는 'harq.rates[1]' 형태의 필드 경로를 붙입니다.
"""
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from models.channel_model import ChannelModel, complex_to_pairs, pairs_to_complex
from utils.errors import ConfigValidationError

CHANNEL_KINDS = ('exponential', 'explicit', 'rician', 'hoyt')
OUTPUT_FORMATS = ('csv', 'json', 'xlsx')


def _check_keys(data: Any, path: str, allowed: List[str], required: List[str] = ()) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigValidationError(path, "객체(JSON object)가 필요합니다")
    for key in data:
        if key not in allowed:
            raise ConfigValidationError(f"{path}.{key}" if path else key, "알 수 없는 키입니다")
    for key in required:
        if key not in data:
            raise ConfigValidationError(f"{path}.{key}" if path else key, "필수 항목이 없습니다")
    return data


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigValidationError(path, f"유한한 숫자가 필요합니다: {value!r}")
    return float(value)


def _integer(value: Any, path: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(path, f"정수가 필요합니다: {value!r}")
    if value < minimum:
        raise ConfigValidationError(path, f"{minimum} 이상이어야 합니다: {value}")
    return value


def _number_list(value: Any, path: str) -> List[float]:
    if not isinstance(value, list) or not value:
        raise ConfigValidationError(path, "비어 있지 않은 숫자 목록이 필요합니다")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _number_or_list(value: Any, path: str) -> List[float]:
    if isinstance(value, list):
        return _number_list(value, path)
    return [_number(value, path)]


def _complex_array(value: Any, path: str, ndim: int, K: int) -> np.ndarray:
    try:
        array = pairs_to_complex(value, ndim)
    except (TypeError, ValueError) as e:
        raise ConfigValidationError(path, str(e)) from e
    expected = (K,) * ndim
    if array.shape != expected:
        raise ConfigValidationError(path, f"크기가 {expected} 여야 합니다: {array.shape}")
    return array


@dataclass
class ChannelSpec:
    """channel 블록"""
    kind: str
    K: int
    rho: float = 0.0
    mean: Optional[np.ndarray] = None
    covariance: Optional[np.ndarray] = None
    relation: Optional[np.ndarray] = None
    k_factor: Optional[float] = None
    q: Optional[float] = None

    @classmethod
    def from_dict(cls, data: Any, path: str = 'channel') -> 'ChannelSpec':
        data = _check_keys(data, path,
                           ['kind', 'K', 'rho', 'mean', 'covariance', 'relation', 'k_factor', 'q'],
                           ['kind', 'K'])
        kind = data['kind']
        if kind not in CHANNEL_KINDS:
            raise ConfigValidationError(f"{path}.kind", f"{CHANNEL_KINDS} 중 하나여야 합니다: {kind!r}")
        K = _integer(data['K'], f"{path}.K", 1)

        allowed = {
            'exponential': {'rho', 'mean', 'relation'},
            'explicit': {'mean', 'covariance', 'relation'},
            'rician': {'rho', 'k_factor'},
            'hoyt': {'rho', 'q'},
        }[kind]
        required = {
            'exponential': {'rho', 'mean'},
            'explicit': {'mean', 'covariance', 'relation'},
            'rician': {'k_factor'},
            'hoyt': {'q'},
        }[kind]
        for key in set(data) - {'kind', 'K'}:
            if key not in allowed:
                raise ConfigValidationError(f"{path}.{key}", f"kind={kind!r} 에서는 사용할 수 없는 키입니다")
        for key in required:
            if key not in data:
                raise ConfigValidationError(f"{path}.{key}", f"kind={kind!r} 에 필요한 항목이 없습니다")

        spec = cls(kind=kind, K=K)
        if 'rho' in data:
            spec.rho = _number(data['rho'], f"{path}.rho")
            if not (0.0 <= spec.rho < 1.0):
                raise ConfigValidationError(f"{path}.rho", f"[0, 1) 범위여야 합니다: {spec.rho}")
        if 'mean' in data:
            spec.mean = _complex_array(data['mean'], f"{path}.mean", 1, K)
        if 'covariance' in data:
            spec.covariance = _complex_array(data['covariance'], f"{path}.covariance", 2, K)
        if 'relation' in data:
            spec.relation = _complex_array(data['relation'], f"{path}.relation", 2, K)
        if 'k_factor' in data:
            spec.k_factor = _number(data['k_factor'], f"{path}.k_factor")
        if 'q' in data:
            spec.q = _number(data['q'], f"{path}.q")
        return spec

    def build(self) -> ChannelModel:
        """채널 모델 생성 (모델 검증 오류는 그대로 전달)"""
        from utils import beckmann_channel as channel

        if self.kind == 'exponential':
            model = channel.build_exponential_model(self.K, self.rho, self.mean)
            if self.relation is not None:
                model = ChannelModel(K=self.K, mean=model.mean, covariance=model.covariance,
                                     relation=self.relation)
                channel.real_form(model)
            return model
        if self.kind == 'explicit':
            model = ChannelModel(K=self.K, mean=self.mean, covariance=self.covariance, relation=self.relation)
            channel.real_form(model)
            return model
        if self.kind == 'rician':
            return channel.build_rician_model(self.K, self.k_factor, self.rho)
        return channel.build_hoyt_model(self.K, self.q, self.rho)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {'kind': self.kind, 'K': self.K}
        if self.kind in ('exponential', 'rician', 'hoyt'):
            result['rho'] = self.rho
        for name in ('mean', 'covariance', 'relation'):
            value = getattr(self, name)
            if value is not None:
                result[name] = complex_to_pairs(value)
        if self.k_factor is not None:
            result['k_factor'] = self.k_factor
        if self.q is not None:
            result['q'] = self.q
        return result


@dataclass
class HarqSpec:
    """harq 블록: 라운드별 전송률과 송신 SNR (dB, 모든 라운드 동일 전력)"""
    rates: List[float]
    snr_db: List[float]

    @classmethod
    def from_dict(cls, data: Any, K: int, path: str = 'harq') -> 'HarqSpec':
        data = _check_keys(data, path, ['rates', 'snr_db'], ['rates', 'snr_db'])
        rates = _number_list(data['rates'], f"{path}.rates")
        if len(rates) != K:
            raise ConfigValidationError(f"{path}.rates", f"길이가 K={K} 여야 합니다: {len(rates)}")
        for i, rate in enumerate(rates):
            if rate <= 0:
                raise ConfigValidationError(f"{path}.rates[{i}]", f"양수여야 합니다: {rate}")
        snr_db = _number_or_list(data['snr_db'], f"{path}.snr_db")
        if any(b <= a for a, b in zip(snr_db, snr_db[1:])):
            raise ConfigValidationError(f"{path}.snr_db", "SNR 목록은 엄격히 증가해야 합니다")
        return cls(rates=rates, snr_db=snr_db)

    def to_dict(self) -> Dict[str, Any]:
        return {'rates': self.rates, 'snr_db': self.snr_db if len(self.snr_db) > 1 else self.snr_db[0]}


@dataclass
class MonteCarloSpec:
    """mc 블록"""
    n: int = 100_000
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Any, path: str = 'mc') -> 'MonteCarloSpec':
        data = _check_keys(data, path, ['n', 'seed'])
        spec = cls()
        if 'n' in data:
            spec.n = _integer(data['n'], f"{path}.n", 1)
        if 'seed' in data:
            spec.seed = _integer(data['seed'], f"{path}.seed", 0)
            if spec.seed >= 2 ** 64:
                raise ConfigValidationError(f"{path}.seed", "64비트 범위를 넘습니다")
        return spec

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'seed': self.seed}


@dataclass
class OptimizeSpec:
    """optimize 블록"""
    epsilon: List[float]
    rate_bounds: List[float] = field(default_factory=lambda: [0.1, 16.0])
    tol_rate: float = 1e-6
    tol_ltat: float = 1e-6
    max_outer: int = 50
    max_dinkelbach: int = 30
    initial: Union[str, List[float]] = 'warm'
    grid_step: float = 0.05

    @classmethod
    def from_dict(cls, data: Any, K: int, path: str = 'optimize') -> 'OptimizeSpec':
        data = _check_keys(data, path, ['epsilon', 'rate_bounds', 'tolerances', 'initial', 'grid_step'],
                           ['epsilon'])
        epsilon = _number_or_list(data['epsilon'], f"{path}.epsilon")
        for i, value in enumerate(epsilon):
            if not (0.0 < value < 1.0):
                raise ConfigValidationError(f"{path}.epsilon[{i}]" if isinstance(data['epsilon'], list)
                                            else f"{path}.epsilon", f"(0, 1) 범위여야 합니다: {value}")
        spec = cls(epsilon=epsilon)

        if 'rate_bounds' in data:
            bounds = _number_list(data['rate_bounds'], f"{path}.rate_bounds")
            if len(bounds) != 2 or not (0.0 < bounds[0] < bounds[1]):
                raise ConfigValidationError(f"{path}.rate_bounds", f"0 < R_lo < R_hi 인 [R_lo, R_hi] 여야 합니다: {bounds}")
            spec.rate_bounds = bounds

        if 'tolerances' in data:
            tolerances = _check_keys(data['tolerances'], f"{path}.tolerances",
                                     ['tol_rate', 'tol_ltat', 'max_outer', 'max_dinkelbach'])
            for name in ('tol_rate', 'tol_ltat'):
                if name in tolerances:
                    value = _number(tolerances[name], f"{path}.tolerances.{name}")
                    if value <= 0:
                        raise ConfigValidationError(f"{path}.tolerances.{name}", f"양수여야 합니다: {value}")
                    setattr(spec, name, value)
            for name in ('max_outer', 'max_dinkelbach'):
                if name in tolerances:
                    setattr(spec, name, _integer(tolerances[name], f"{path}.tolerances.{name}", 1))

        if 'initial' in data:
            initial = data['initial']
            if initial == 'warm':
                spec.initial = 'warm'
            else:
                rates = _number_list(initial, f"{path}.initial")
                if len(rates) != K:
                    raise ConfigValidationError(f"{path}.initial", f"길이가 K={K} 여야 합니다: {len(rates)}")
                spec.initial = rates

        if 'grid_step' in data:
            spec.grid_step = _number(data['grid_step'], f"{path}.grid_step")
            if spec.grid_step <= 0:
                raise ConfigValidationError(f"{path}.grid_step", f"양수여야 합니다: {spec.grid_step}")
        return spec

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epsilon': self.epsilon,
            'rate_bounds': self.rate_bounds,
            'tolerances': {
                'tol_rate': self.tol_rate,
                'tol_ltat': self.tol_ltat,
                'max_outer': self.max_outer,
                'max_dinkelbach': self.max_dinkelbach,
            },
            'initial': self.initial,
            'grid_step': self.grid_step,
        }


@dataclass
class OutputSpec:
    """output 블록"""
    format: str = 'csv'
    path: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Any, path: str = 'output') -> 'OutputSpec':
        data = _check_keys(data, path, ['format', 'path'])
        spec = cls()
        if 'format' in data:
            if data['format'] not in OUTPUT_FORMATS:
                raise ConfigValidationError(f"{path}.format", f"{OUTPUT_FORMATS} 중 하나여야 합니다: {data['format']!r}")
            spec.format = data['format']
        if 'path' in data:
            if not isinstance(data['path'], str) or not data['path']:
                raise ConfigValidationError(f"{path}.path", "파일 경로 문자열이 필요합니다")
            spec.path = data['path']
        return spec

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {'format': self.format}
        if self.path:
            result['path'] = self.path
        return result


@dataclass
class ExperimentConfig:
    """실험 설정 전체"""
    channel: ChannelSpec
    harq: HarqSpec
    mc: Optional[MonteCarloSpec] = None
    optimize: Optional[OptimizeSpec] = None
    output: OutputSpec = field(default_factory=OutputSpec)

    @property
    def K(self) -> int:
        return self.channel.K

    @classmethod
    def from_dict(cls, data: Any) -> 'ExperimentConfig':
        data = _check_keys(data, '', ['channel', 'harq', 'mc', 'optimize', 'output'], ['channel', 'harq'])
        channel = ChannelSpec.from_dict(data['channel'])
        return cls(
            channel=channel,
            harq=HarqSpec.from_dict(data['harq'], channel.K),
            mc=MonteCarloSpec.from_dict(data['mc']) if 'mc' in data else None,
            optimize=OptimizeSpec.from_dict(data['optimize'], channel.K) if 'optimize' in data else None,
            output=OutputSpec.from_dict(data['output']) if 'output' in data else OutputSpec(),
        )

    def to_dict(self) -> Dict[str, Any]:
        result = {
            'channel': self.channel.to_dict(),
            'harq': self.harq.to_dict(),
            'output': self.output.to_dict(),
        }
        if self.mc is not None:
            result['mc'] = self.mc.to_dict()
        if self.optimize is not None:
            result['optimize'] = self.optimize.to_dict()
        return result


def load_config(config_path: Union[str, Path]) -> ExperimentConfig:
    """
    JSON 실험 설정 파일 로드

    Raises:
        FileNotFoundError: 파일이 없는 경우
        ConfigValidationError: JSON 문법 오류 또는 검증 실패
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise FileNotFoundError(f"설정 파일을 찾을 수 없습니다: {config_path}")
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigValidationError('', f"JSON 문법 오류 ({config_path}): {e}") from e
    return ExperimentConfig.from_dict(data)
