"""공통 pytest 설정과 픽스처"""
import json
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

import pytest

from utils import beckmann_channel as channel

LOS_MEAN = (1 + 1j) / math.sqrt(2)
LOS_MEAN_PAIR = [LOS_MEAN.real, LOS_MEAN.imag]


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: 큰 표본/전체 규모 실행 (pytest -m "not slow" 로 제외)')


@pytest.fixture
def reference_model_k2():
    """K=2, ρ=0.8, h̄_k=(1+i)/√2"""
    return channel.build_exponential_model(2, 0.8, [LOS_MEAN] * 2)


@pytest.fixture
def reference_model_k4():
    """K=4, ρ=0.8, h̄_k=(1+i)/√2"""
    return channel.build_exponential_model(4, 0.8, [LOS_MEAN] * 4)


@pytest.fixture
def rayleigh_k1():
    return channel.build_exponential_model(1, 0.0, [0.0])


@pytest.fixture
def config_dict():
    """K=2 논문 설정 (outage/ltat/optimize 공용)"""
    return {
        'channel': {'kind': 'exponential', 'K': 2, 'rho': 0.8, 'mean': [LOS_MEAN_PAIR, LOS_MEAN_PAIR]},
        'harq': {'rates': [3, 5], 'snr_db': [15, 20, 25]},
        'mc': {'n': 20000, 'seed': 7},
        'optimize': {'epsilon': [1e-3, 1e-2], 'tolerances': {'tol_rate': 1e-5, 'tol_ltat': 1e-7}},
    }


@pytest.fixture
def write_config(tmp_path):
    """설정 dict 를 JSON 파일로 저장하고 경로를 반환하는 함수"""

    def write(data, name='config.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)

    return write
