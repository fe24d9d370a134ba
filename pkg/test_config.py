"""실험 설정 로드/검증 테스트"""
import copy
import glob
import os

import numpy as np
import pytest

from models.experiment_config import ExperimentConfig, OptimizeSpec, load_config
from utils.errors import ConfigValidationError, ModelValidationError

TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'templates')


def error_path(data):
    with pytest.raises(ConfigValidationError) as excinfo:
        ExperimentConfig.from_dict(data)
    return excinfo.value.path


def test_valid_config_loads(config_dict):
    config = ExperimentConfig.from_dict(config_dict)

    assert config.K == 2
    assert config.harq.snr_db == [15, 20, 25]
    assert config.mc.n == 20000
    assert config.optimize.tol_rate == 1e-5
    assert config.optimize.max_outer == 50
    assert config.optimize.rate_bounds == [0.1, 16.0]
    assert config.output.format == 'csv'


def test_scalar_snr_and_epsilon(config_dict):
    config_dict['harq']['snr_db'] = 20
    config_dict['optimize']['epsilon'] = 0.01
    config = ExperimentConfig.from_dict(config_dict)

    assert config.harq.snr_db == [20.0]
    assert config.optimize.epsilon == [0.01]


def test_optional_blocks_absent(config_dict):
    del config_dict['mc']
    del config_dict['optimize']
    config = ExperimentConfig.from_dict(config_dict)

    assert config.mc is None
    assert config.optimize is None


@pytest.mark.parametrize('mutate, path', [
    (lambda d: d['channel'].update(foo=1), 'channel.foo'),
    (lambda d: d.update(extra={}), 'extra'),
    (lambda d: d['harq']['rates'].__setitem__(1, -5), 'harq.rates[1]'),
    (lambda d: d['harq'].update(rates=[3]), 'harq.rates'),
    (lambda d: d['harq'].update(snr_db=[20, 15]), 'harq.snr_db'),
    (lambda d: d['mc'].update(n=0), 'mc.n'),
    (lambda d: d['mc'].update(seed=-1), 'mc.seed'),
    (lambda d: d['channel'].update(kind='nakagami'), 'channel.kind'),
    (lambda d: d['channel'].update(rho=1.5), 'channel.rho'),
    (lambda d: d['channel'].update(mean=[[1, 0]]), 'channel.mean'),
    (lambda d: d['channel'].update(k_factor=3), 'channel.k_factor'),
    (lambda d: d['optimize'].update(epsilon=[0.1, 1.5]), 'optimize.epsilon[1]'),
    (lambda d: d['optimize']['tolerances'].update(tol_rate=0), 'optimize.tolerances.tol_rate'),
    (lambda d: d['optimize'].update(rate_bounds=[4, 1]), 'optimize.rate_bounds'),
    (lambda d: d['optimize'].update(initial=[1.0]), 'optimize.initial'),
    (lambda d: d.update(output={'format': 'pdf'}), 'output.format'),
    (lambda d: d.pop('harq'), 'harq'),
])
def test_invalid_fields_report_paths(config_dict, mutate, path):
    data = copy.deepcopy(config_dict)
    mutate(data)

    assert error_path(data) == path


def test_explicit_channel_requires_matrices(config_dict):
    config_dict['channel'] = {'kind': 'explicit', 'K': 1, 'mean': [[0, 0]], 'covariance': [[[1, 0]]]}
    config_dict['harq']['rates'] = [3]
    config_dict['optimize']['initial'] = 'warm'

    assert error_path(config_dict) == 'channel.relation'


def test_explicit_channel_builds_and_validates(config_dict):
    config_dict['channel'] = {'kind': 'explicit', 'K': 1, 'mean': [0.5],
                              'covariance': [[1.0]], 'relation': [[[0, 0.3]]]}
    config_dict['harq']['rates'] = [3]
    model = ExperimentConfig.from_dict(config_dict).channel.build()

    assert model.relation[0, 0] == 0.3j
    assert model.mean[0] == 0.5


def test_invalid_explicit_model_surfaces_model_error(config_dict):
    config_dict['channel'] = {'kind': 'explicit', 'K': 1, 'mean': [0],
                              'covariance': [[1.0]], 'relation': [[2.0]]}
    config_dict['harq']['rates'] = [3]
    config = ExperimentConfig.from_dict(config_dict)

    with pytest.raises(ModelValidationError):
        config.channel.build()


@pytest.mark.parametrize('channel_block', [
    {'kind': 'rician', 'K': 2, 'k_factor': 3.0, 'rho': 0.5},
    {'kind': 'hoyt', 'K': 2, 'q': 0.4},
])
def test_special_case_channels_build(config_dict, channel_block):
    config_dict['channel'] = channel_block
    model = ExperimentConfig.from_dict(config_dict).channel.build()

    assert model.K == 2


def test_exponential_relation_override(config_dict):
    config_dict['channel']['relation'] = [[0, 0], [0, 0]]
    model = ExperimentConfig.from_dict(config_dict).channel.build()

    np.testing.assert_array_equal(model.relation, np.zeros((2, 2)))


def test_config_dict_round_trip(config_dict):
    config = ExperimentConfig.from_dict(config_dict)
    again = ExperimentConfig.from_dict(config.to_dict())

    assert again.to_dict() == config.to_dict()


def test_optimize_defaults():
    spec = OptimizeSpec.from_dict({'epsilon': 0.001}, K=2)

    assert (spec.tol_rate, spec.tol_ltat, spec.max_outer, spec.max_dinkelbach) == (1e-6, 1e-6, 50, 30)
    assert spec.initial == 'warm'


def test_load_config_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / 'missing.json')

    broken = tmp_path / 'broken.json'
    broken.write_text('{"channel": ', encoding='utf-8')
    with pytest.raises(ConfigValidationError):
        load_config(broken)


@pytest.mark.parametrize('template', sorted(glob.glob(os.path.join(TEMPLATE_DIR, '*.json'))))
def test_templates_are_valid(template):
    config = load_config(template)

    assert config.channel.build().K == config.K
