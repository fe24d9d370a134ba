import sys
import os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import argparse
import logging
from typing import List, Optional

from commands.base_command import run_command
from commands.experiment_commands import (LtatCommand, OptimizeCommand, OutageCommand, SelftestCommand,
                                          selftest_passed)
from models.experiment_config import OUTPUT_FORMATS, load_config
from utils.errors import (ConfigValidationError, ConvergenceError, FactorizationError, HarqBeckError,
                          InfeasibleError, ModelValidationError, NumericalError, PreconditionError,
                          SingularCovarianceError)
from utils.report_writer import write_report
from utils.selftest import Selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_SELFTEST = 3

NUMERIC_ERRORS = (FactorizationError, SingularCovarianceError, ConvergenceError, InfeasibleError, NumericalError)
VALIDATION_ERRORS = (ConfigValidationError, ModelValidationError, PreconditionError, FileNotFoundError, ValueError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='harqbeck',
        description="상관 Beckmann 페이딩 HARQ-IR 아웃티지/LTAT 계산 및 전송률 최적화")
    parser.add_argument('command', choices=['outage', 'ltat', 'optimize', 'selftest'], help="실행할 명령")
    parser.add_argument('--config', help="JSON 실험 설정 파일 (selftest 외 필수)")
    parser.add_argument('--out', help="결과 파일 경로 (없으면 표준 출력)")
    parser.add_argument('--streams', type=int, default=1, help="MC/격자 병렬 스트림 수 (결과는 동일)")
    parser.add_argument('--grid-check', action='store_true', help="optimize: 격자 전수 탐색 기준값도 계산")
    parser.add_argument('--format', choices=OUTPUT_FORMATS, help="출력 형식 (설정 파일 값을 덮어씀)")
    parser.add_argument('--timing', action='store_true', help="runtime_ms 열에 실제 소요 시간 기록")
    parser.add_argument('--suite', action='append', choices=Selftest.SUITES,
                        help="selftest: 실행할 점검 모음 (여러 번 지정 가능)")
    parser.add_argument('--inject-delta-eq-zero', action='store_true',
                        help="selftest: δ_eq = 0 을 주입해 디스패처 연속성 점검이 실패하는지 확인")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help="DEBUG 로그 출력")
    verbosity.add_argument('--quiet', action='store_true', help="경고 이상만 출력")
    return parser


def setup_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    logging.getLogger().setLevel(level)


def run(args: argparse.Namespace) -> int:
    config = None
    if args.config:
        config = load_config(args.config)
    elif args.command != 'selftest':
        raise ConfigValidationError('--config', f"{args.command} 명령에는 설정 파일이 필요합니다")

    if args.command == 'outage':
        command = OutageCommand(config, args.streams, args.timing)
    elif args.command == 'ltat':
        command = LtatCommand(config, args.streams, args.timing)
    elif args.command == 'optimize':
        command = OptimizeCommand(config, args.streams, args.timing, args.grid_check)
    else:
        command = SelftestCommand(config, args.suite, args.inject_delta_eq_zero)

    report = run_command(command)

    if isinstance(command, SelftestCommand):
        print(command.summary)
        if args.out:
            write_report(report, args.format or 'csv', args.out)
        return EXIT_OK if selftest_passed(report) else EXIT_SELFTEST

    fmt = args.format or config.output.format
    path = args.out or config.output.path
    text = write_report(report, fmt, path)
    if text is not None:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse 사용법 오류도 검증 오류로 취급
        return EXIT_OK if e.code in (0, None) else EXIT_VALIDATION
    setup_logging(args.verbose, args.quiet)

    try:
        return run(args)
    except NUMERIC_ERRORS as e:
        logger.error(f"수치 계산 오류: {e}")
        return EXIT_NUMERIC
    except VALIDATION_ERRORS as e:
        logger.error(f"입력 검증 오류: {e}")
        return EXIT_VALIDATION
    except HarqBeckError as e:
        logger.error(f"실행 오류: {e}")
        return EXIT_NUMERIC


if __name__ == '__main__':
    sys.exit(main())
