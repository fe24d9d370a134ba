"""채널 모델 / 표본 추출 / 밀도 테스트"""
import logging
import math

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from models.channel_model import ChannelModel
from utils import beckmann_channel as channel
from utils.errors import ModelValidationError, SingularCovarianceError
from utils.selftest import Selftest


def test_exponential_model_structure():
    model = channel.build_exponential_model(3, 0.8, [1.0, 1j, 0.5])

    expected_R = np.array([[1.0, 0.8, 0.64], [0.8, 1.0, 0.8], [0.64, 0.8, 1.0]])
    np.testing.assert_allclose(model.covariance, expected_R)
    np.testing.assert_allclose(model.relation, 1j * 0.8 ** 3 * np.ones((3, 3)))
    np.testing.assert_allclose(model.mean, [1.0, 1j, 0.5])


def test_rho_zero_is_circular():
    model = channel.build_exponential_model(2, 0.0, [0.0, 0.0])

    np.testing.assert_array_equal(model.relation, np.zeros((2, 2)))
    np.testing.assert_array_equal(model.covariance, np.eye(2))


def test_model_arrays_are_read_only(reference_model_k2):
    with pytest.raises(ValueError):
        reference_model_k2.covariance[0, 0] = 2.0


def test_dimension_mismatch_rejected():
    with pytest.raises(ModelValidationError):
        ChannelModel(K=2, mean=np.zeros(3), covariance=np.eye(2), relation=np.zeros((2, 2)))
    with pytest.raises(ModelValidationError):
        channel.build_exponential_model(2, 0.5, [0.0])


def test_rho_out_of_range_rejected():
    with pytest.raises(ModelValidationError):
        channel.build_exponential_model(2, 1.0, [0.0, 0.0])


def test_real_covariance_block_layout(reference_model_k2):
    V = channel.real_covariance(reference_model_k2)
    R = reference_model_k2.covariance
    C = reference_model_k2.relation

    assert V.shape == (4, 4)
    np.testing.assert_allclose(V, V.T)
    np.testing.assert_allclose(V[:2, :2], 0.5 * np.real(R + C))
    np.testing.assert_allclose(V[2:, 2:], 0.5 * np.real(R - C))
    np.testing.assert_allclose(V[2:, :2], 0.5 * np.imag(R + C))
    np.testing.assert_allclose(V[:2, 2:], 0.5 * np.imag(-R + C))


@pytest.mark.parametrize('model_args', [(2, 0.8), (3, 0.5), (4, 0.8)])
def test_real_covariance_blocks_rebuild_r_and_c(model_args):
    K, rho = model_args
    model = channel.build_exponential_model(K, rho, [(1 + 1j) / math.sqrt(2)] * K)
    V = channel.real_covariance(model)
    V11, V12, V21, V22 = V[:K, :K], V[:K, K:], V[K:, :K], V[K:, K:]

    np.testing.assert_allclose((V11 + V22) + 1j * (V21 - V12), model.covariance, rtol=0, atol=1e-12)
    np.testing.assert_allclose((V11 - V22) + 1j * (V21 + V12), model.relation, rtol=0, atol=1e-12)


@pytest.mark.parametrize('K', [2, 4])
def test_reference_models_are_valid(K):
    model = channel.build_exponential_model(K, 0.8, [(1 + 1j) / math.sqrt(2)] * K)
    report = channel.validate(model)

    assert report.passed, report.summary()
    assert report.get('real_covariance_psd').value > 0


def test_invalid_relation_reports_failure():
    model = ChannelModel(K=1, mean=[0.0], covariance=[[1.0]], relation=[[2.0]])
    report = channel.validate(model)

    assert not report.passed
    assert [c.name for c in report.failures] == ['real_covariance_psd']
    with pytest.raises(ModelValidationError):
        channel.real_form(model)


def test_non_hermitian_covariance_reported():
    model = ChannelModel(K=2, mean=[0.0, 0.0], covariance=[[1.0, 0.5], [0.2, 1.0]], relation=np.zeros((2, 2)))

    assert not channel.validate(model).get('covariance_hermitian').passed


def test_asymmetric_relation_reported():
    model = ChannelModel(K=2, mean=[0.0, 0.0], covariance=np.eye(2), relation=[[0.0, 0.1], [0.2, 0.0]])
    report = channel.validate(model)

    assert not report.get('relation_symmetric').passed
    assert report.get('relation_symmetric').value == pytest.approx(0.1)
    with pytest.raises(ModelValidationError):
        channel.real_form(model)


def test_singular_model_gets_jitter_and_has_no_density(caplog):
    # |C| = R 이면 V 가 특이 행렬 (허수부 분산 0)
    model = ChannelModel(K=1, mean=[0.0], covariance=[[1.0]], relation=[[1.0]])

    with caplog.at_level(logging.WARNING):
        form = channel.real_form(model)
    assert form.jitter > 0
    assert any('지터' in record.getMessage() for record in caplog.records)
    with pytest.raises(SingularCovarianceError):
        channel.log_density(model, np.zeros(1))


def test_rank_one_relation_takes_jitter_path(caplog):
    model = ChannelModel(K=1, mean=[0.0], covariance=[[1.0]], relation=[[1j]])

    np.testing.assert_allclose(channel.real_covariance(model), 0.5 * np.ones((2, 2)))
    with caplog.at_level(logging.WARNING):
        form = channel.real_form(model)
    assert form.jitter > 0
    np.testing.assert_allclose(form.factor @ form.factor.T, form.cov_real, rtol=0, atol=form.jitter + 1e-12)
    with pytest.raises(SingularCovarianceError):
        channel.density_at_zero(model)


def test_hoyt_model_is_block_diagonal():
    q = 0.5
    model = channel.build_hoyt_model(2, q, rho=0.3)
    V = channel.real_covariance(model)
    c = (1 - q * q) / (1 + q * q)

    np.testing.assert_allclose(V[:2, 2:], 0.0, atol=1e-15)
    np.testing.assert_allclose(np.diag(V), [0.5 * (1 + c)] * 2 + [0.5 * (1 - c)] * 2)


def test_rician_model_has_unit_power():
    model = channel.build_rician_model(3, k_factor=4.0, rho=0.5, phase=0.3)
    power = np.abs(model.mean) ** 2 + np.real(np.diag(model.covariance))

    np.testing.assert_allclose(power, 1.0)
    np.testing.assert_array_equal(model.relation, 0.0)


def test_restrict_takes_leading_blocks(reference_model_k4):
    restricted = channel.restrict(reference_model_k4, 2)

    assert restricted.K == 2
    np.testing.assert_array_equal(restricted.covariance, reference_model_k4.covariance[:2, :2])
    np.testing.assert_array_equal(restricted.relation, reference_model_k4.relation[:2, :2])
    np.testing.assert_array_equal(restricted.mean, reference_model_k4.mean[:2])


def test_model_dict_encoding(reference_model_k2):
    data = reference_model_k2.to_dict()

    assert data['mean'][0] == pytest.approx([1 / math.sqrt(2), 1 / math.sqrt(2)])
    restored = ChannelModel.from_dict(data)
    np.testing.assert_array_equal(restored.relation, reference_model_k2.relation)


def test_sampling_is_reproducible(reference_model_k2):
    first = channel.sample(reference_model_k2, 1000, seed=42)
    second = channel.sample(reference_model_k2, 1000, seed=42)
    other_stream = channel.sample(reference_model_k2, 1000, seed=42, stream=1)

    assert first.shape == (1000, 2)
    np.testing.assert_array_equal(first, second)
    assert not np.allclose(first, other_stream)


def test_sample_prefix_is_stable_across_lengths(reference_model_k2):
    short = channel.sample(reference_model_k2, 100, seed=3)
    long = channel.sample(reference_model_k2, 70000, seed=3)

    np.testing.assert_array_equal(short, long[:100])


def test_sample_statistics_match_model(reference_model_k2):
    n = 200_000
    h = channel.sample(reference_model_k2, n, seed=11)
    centered = h - reference_model_k2.mean

    assert Selftest._within(h, reference_model_k2.mean, 5.0)[0]
    assert Selftest._within(centered[:, :, None] * centered[:, None, :].conj(),
                            reference_model_k2.covariance, 5.0)[0]
    assert Selftest._within(centered[:, :, None] * centered[:, None, :],
                            reference_model_k2.relation, 5.0)[0]


@pytest.mark.slow
def test_sample_statistics_million_draws(reference_model_k2):
    n = 1_000_000
    h = channel.sample(reference_model_k2, n, seed=2024)
    centered = h - reference_model_k2.mean

    assert Selftest._within(h, reference_model_k2.mean, 5.0)[0]
    assert Selftest._within(centered[:, :, None] * centered[:, None, :].conj(),
                            reference_model_k2.covariance, 5.0)[0]
    assert Selftest._within(centered[:, :, None] * centered[:, None, :],
                            reference_model_k2.relation, 5.0)[0]


def test_rayleigh_density_at_zero(rayleigh_k1):
    assert channel.density_at_zero(rayleigh_k1) == pytest.approx(1 / math.pi, rel=1e-12)


def test_log_density_matches_real_gaussian(reference_model_k2):
    rng = np.random.default_rng(0)
    h = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    reference = multivariate_normal(mean=channel.real_mean(reference_model_k2),
                                    cov=channel.real_covariance(reference_model_k2))

    expected = reference.logpdf(np.concatenate([h.real, h.imag], axis=1))
    np.testing.assert_allclose(channel.log_density(reference_model_k2, h), expected, rtol=1e-10)
    assert channel.log_density(reference_model_k2, h[0]) == pytest.approx(expected[0], rel=1e-10)


def test_k1_density_normalizes():
    model = channel.build_exponential_model(1, 0.5, [0.3 + 0.2j])

    assert Selftest._normalization(model) == pytest.approx(1.0, abs=1e-3)
