"""
상관 Beckmann 채널 모듈

채널 모델의 생성, 검증, 실수 가우시안 변환, 표본 추출, 밀도 계산을 담당합니다.
밀도는 (Re h; Im h) 의 2K 차원 실수 가우시안으로 정의합니다.
"""
import logging
import math
from typing import Sequence

import numpy as np
from scipy.linalg import cholesky, solve_triangular, toeplitz

from models.channel_model import (ChannelModel, RealGaussianForm, ValidationCheck,
                                  ValidityReport, as_complex_vector)
from .errors import FactorizationError, ModelValidationError, SingularCovarianceError

logger = logging.getLogger(__name__)

# V 의 고유값이 -PSD_TOLERANCE * ||V||_2 이상이면 양반정부호로 간주
PSD_TOLERANCE = 1e-10
# Cholesky 실패 시 대각에 더하는 지터 (||V||_max 에 대한 상대값)
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)
# Cholesky 최소 피벗이 최대 피벗의 이 비율 미만이면 특이 행렬로 취급
MIN_PIVOT_RATIO = 1e-7
SYMMETRY_TOLERANCE = 1e-12


def _exponential_covariance(K: int, rho: float) -> np.ndarray:
    return toeplitz(np.power(rho, np.arange(K))).astype(complex)


def _check_rho(rho: float):
    if not (0.0 <= rho < 1.0):
        raise ModelValidationError(f"상관 계수 rho 는 [0, 1) 범위여야 합니다: {rho}")


def _validated(model: ChannelModel) -> ChannelModel:
    report = validate(model)
    if not report.passed:
        raise ModelValidationError(f"유효하지 않은 채널 모델: {report.summary()}")
    return model


def build_exponential_model(K: int, rho: float, mean: Sequence[complex]) -> ChannelModel:
    """
    지수 상관 공분산과 상수 상관 관계 행렬로 채널 모델 생성

    R[m][n] = rho^|m-n|, C[m][n] = i·rho^K (대각 포함 모든 항목).
    rho = 0 이면 0⁰ := 0 으로 보고 C = 0 (원형 Rician/Rayleigh).

    Args:
        K: HARQ 라운드 수
        rho: 시간 상관 계수 (0 ≤ rho < 1)
        mean: LOS 평균 벡터 h̄ (길이 K)

    Returns:
        ChannelModel: 검증된 채널 모델
    """
    _check_rho(rho)
    mean = as_complex_vector(mean)
    if mean.shape[0] != K:
        raise ModelValidationError(f"평균 벡터 길이 {mean.shape[0]} 가 K={K} 와 다릅니다")

    pseudo = rho ** K if rho > 0 else 0.0
    model = ChannelModel(
        K=K,
        mean=mean,
        covariance=_exponential_covariance(K, rho),
        relation=1j * pseudo * np.ones((K, K)),
    )
    return _validated(model)


def build_rician_model(K: int, k_factor: float, rho: float = 0.0, phase: float = 0.0) -> ChannelModel:
    """
    원형(C = 0) Rician 모델, 평균 전력 1

    Args:
        K: 라운드 수
        k_factor: Rician K 인자 (0 이면 Rayleigh)
        rho: 산란 성분의 지수 상관 계수
        phase: LOS 위상 (rad)
    """
    _check_rho(rho)
    if k_factor < 0:
        raise ModelValidationError(f"Rician K 인자는 0 이상이어야 합니다: {k_factor}")
    scatter = 1.0 / (1.0 + k_factor)
    los = math.sqrt(k_factor / (1.0 + k_factor)) * np.exp(1j * phase)
    model = ChannelModel(
        K=K,
        mean=np.full(K, los, dtype=complex),
        covariance=scatter * _exponential_covariance(K, rho),
        relation=np.zeros((K, K), dtype=complex),
    )
    return _validated(model)


def build_hoyt_model(K: int, q: float, rho: float = 0.0) -> ChannelModel:
    """
    영평균 Hoyt (Nakagami-q) 모델

    C = ((1-q²)/(1+q²))·R 이므로 V = ½·diag(R(1+c), R(1-c)) 블록 대각 형태입니다.

    Args:
        K: 라운드 수
        q: Nakagami-q 인자 (0 < q ≤ 1, 1 이면 Rayleigh)
        rho: 지수 상관 계수
    """
    _check_rho(rho)
    if not (0.0 < q <= 1.0):
        raise ModelValidationError(f"Hoyt q 인자는 (0, 1] 범위여야 합니다: {q}")
    covariance = _exponential_covariance(K, rho)
    c = (1.0 - q * q) / (1.0 + q * q)
    model = ChannelModel(
        K=K,
        mean=np.zeros(K, dtype=complex),
        covariance=covariance,
        relation=c * covariance,
    )
    return _validated(model)


def restrict(model: ChannelModel, k: int) -> ChannelModel:
    """처음 k 라운드로 제한한 모델 (R, C 의 선행 k×k 블록, h̄ 의 처음 k 항목)"""
    if not (1 <= k <= model.K):
        raise ModelValidationError(f"라운드 인덱스 k 는 1..{model.K} 범위여야 합니다: {k}")
    if k == model.K:
        return model
    return ChannelModel(
        K=k,
        mean=model.mean[:k],
        covariance=model.covariance[:k, :k],
        relation=model.relation[:k, :k],
    )


def real_covariance(model: ChannelModel) -> np.ndarray:
    """V = ½·[[Re(R+C), Im(-R+C)], [Im(R+C), Re(R-C)]]"""
    R = model.covariance
    C = model.relation
    return 0.5 * np.block([
        [np.real(R + C), np.imag(-R + C)],
        [np.imag(R + C), np.real(R - C)],
    ])


def real_mean(model: ChannelModel) -> np.ndarray:
    return np.concatenate([model.mean.real, model.mean.imag])


def validate(model: ChannelModel) -> ValidityReport:
    """
    채널 모델 불변식 진단

    Returns:
        ValidityReport: 불변식별 통과 여부와 문제 수치
    """
    R = model.covariance
    C = model.relation
    report = ValidityReport()

    scale_R = max(1.0, float(np.max(np.abs(R))))
    hermitian_gap = float(np.max(np.abs(R - R.conj().T)))
    report.checks.append(ValidationCheck(
        name='covariance_hermitian',
        passed=hermitian_gap <= SYMMETRY_TOLERANCE * scale_R,
        detail=f"max|R - Rᴴ| = {hermitian_gap:.3e}",
        value=hermitian_gap,
    ))

    diagonal = np.diag(R)
    min_diag = float(np.min(diagonal.real))
    report.checks.append(ValidationCheck(
        name='covariance_diagonal_positive',
        passed=min_diag > 0.0 and float(np.max(np.abs(diagonal.imag))) <= SYMMETRY_TOLERANCE * scale_R,
        detail=f"min Re(diag R) = {min_diag:.3e}",
        value=min_diag,
    ))

    scale_C = max(1.0, float(np.max(np.abs(C))))
    symmetry_gap = float(np.max(np.abs(C - C.T)))
    report.checks.append(ValidationCheck(
        name='relation_symmetric',
        passed=symmetry_gap <= SYMMETRY_TOLERANCE * scale_C,
        detail=f"max|C - Cᵀ| = {symmetry_gap:.3e}",
        value=symmetry_gap,
    ))

    V = real_covariance(model)
    V_sym = 0.5 * (V + V.T)
    eigenvalues = np.linalg.eigvalsh(V_sym)
    spectral_norm = float(np.max(np.abs(eigenvalues)))
    min_eig = float(eigenvalues[0])
    report.checks.append(ValidationCheck(
        name='real_covariance_psd',
        passed=min_eig >= -PSD_TOLERANCE * spectral_norm,
        detail=f"V 최소 고유값 = {min_eig:.3e}",
        value=min_eig,
    ))
    return report


def real_form(model: ChannelModel) -> RealGaussianForm:
    """
    실수 가우시안 표현과 Cholesky 인수 계산

    분해에 실패하거나 최소 피벗이 최대 피벗의 MIN_PIVOT_RATIO 배 미만이면
    대각 지터를 1e-12, 1e-10, 1e-8 (||V||_max 상대) 순서로 늘립니다.
    """
    _validated(model)
    V = real_covariance(model)
    scale = float(np.max(np.abs(V)))

    for relative_jitter in JITTER_LADDER:
        jitter = relative_jitter * scale
        try:
            factor = cholesky(V + jitter * np.eye(V.shape[0]), lower=True, check_finite=True)
        except np.linalg.LinAlgError:
            logger.debug(f"Cholesky 실패, 지터 상향 (현재 {jitter:.1e})")
            continue
        pivots = np.diag(factor)
        if np.min(pivots) < MIN_PIVOT_RATIO * np.max(pivots):
            logger.debug(f"Cholesky 피벗 {np.min(pivots):.1e} 이 너무 작아 지터 상향 (현재 {jitter:.1e})")
            continue
        if jitter > 0:
            logger.warning(f"V 가 특이에 가까워 대각 지터 {jitter:.1e} 를 적용했습니다")
        return RealGaussianForm(
            mean_real=real_mean(model),
            cov_real=V,
            factor=factor,
            jitter=jitter,
        )

    raise FactorizationError(
        f"지터 {JITTER_LADDER[-1]:.0e} 까지 늘려도 V 의 Cholesky 분해에 실패했습니다")


def make_rng(seed: int, stream: int = 0, block: int = 0) -> np.random.Generator:
    """(seed, stream, block) 으로 키를 정하는 카운터 기반 Philox 생성기"""
    if seed < 0 or stream < 0 or block < 0:
        raise ValueError(f"seed/stream/block 은 음이 아닌 정수여야 합니다: {seed}, {stream}, {block}")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.Philox(sequence))


# 표본은 고정 크기 블록 단위로 생성되어 샤드 수와 무관하게 같은 값이 나옵니다
SAMPLE_BLOCK_SIZE = 1 << 16


def block_count(n: int) -> int:
    return (n + SAMPLE_BLOCK_SIZE - 1) // SAMPLE_BLOCK_SIZE


def sample_block(form: RealGaussianForm, n: int, seed: int, stream: int, block: int) -> np.ndarray:
    """
    블록 하나의 채널 표본 생성

    Returns:
        np.ndarray: (size, K) 복소 배열, size = 블록 크기 (마지막 블록은 나머지)
    """
    size = min(SAMPLE_BLOCK_SIZE, n - block * SAMPLE_BLOCK_SIZE)
    rng = make_rng(seed, stream, block)
    z = rng.standard_normal((size, form.dimension))
    x = form.mean_real + z @ form.factor.T
    K = form.dimension // 2
    return x[:, :K] + 1j * x[:, K:]


def sample(model: ChannelModel, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """
    채널 벡터 n 개 추출

    Args:
        model: 채널 모델
        n: 표본 수 (n ≥ 1)
        seed: 64비트 시드
        stream: 스트림 인덱스 (서로 다른 스트림은 독립)

    Returns:
        np.ndarray: (n, K) 복소 배열
    """
    if n < 1:
        raise ValueError(f"표본 수는 1 이상이어야 합니다: {n}")
    form = real_form(model)
    blocks = [sample_block(form, n, seed, stream, b) for b in range(block_count(n))]
    return np.concatenate(blocks, axis=0)


def log_density(model: ChannelModel, h) -> np.ndarray:
    """
    채널 벡터 h 에서의 로그 밀도

    (Re h; Im h) 의 2K 차원 가우시안(평균 mean_real, 공분산 V) 로그 밀도입니다.
    h 는 (K,) 또는 (n, K) 배열을 받을 수 있습니다.
    """
    _validated(model)
    V = real_covariance(model)
    try:
        factor = cholesky(V, lower=True)
    except np.linalg.LinAlgError as e:
        raise SingularCovarianceError(f"V 가 특이 행렬이라 밀도가 존재하지 않습니다: {e}") from e
    diagonal = np.diag(factor)
    if np.min(diagonal) < MIN_PIVOT_RATIO * np.max(diagonal):
        raise SingularCovarianceError("V 가 수치적으로 특이 행렬입니다")

    h = np.asarray(h, dtype=complex)
    single = h.ndim == 1
    h = np.atleast_2d(h)
    if h.shape[1] != model.K:
        raise ModelValidationError(f"h 길이 {h.shape[1]} 가 K={model.K} 와 다릅니다")

    x = np.concatenate([h.real, h.imag], axis=1) - real_mean(model)
    y = solve_triangular(factor, x.T, lower=True)
    values = (-model.K * math.log(2.0 * math.pi)
              - float(np.sum(np.log(diagonal)))
              - 0.5 * np.sum(y * y, axis=0))
    return float(values[0]) if single else values


def density_at_zero(model: ChannelModel) -> float:
    """f_h(0): 점근 아웃티지의 선행 상수"""
    return math.exp(log_density(model, np.zeros(model.K, dtype=complex)))
