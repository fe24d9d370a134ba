# 명령 패턴: CLI 하위 명령 구현
