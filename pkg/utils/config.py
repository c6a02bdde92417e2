import os

from utils.exceptions import DomainError

log_level = os.getenv('GJQ_LOG_LEVEL')
if not log_level:
    log_level = "INFO"
# 空字符串表示不写日志文件
log_file = os.getenv('GJQ_LOG_FILE', "gauss_jacobi.log")
oracle_max_n = int(os.getenv('GJQ_ORACLE_MAX_N') or 5000)
small_n_cutoff = int(os.getenv('GJQ_SMALL_N') or 20)


def get_threads() -> int:
    """读取 GJQ_THREADS（并行线程上限），未设置时为 1"""
    raw = os.getenv('GJQ_THREADS')
    if raw is None or raw.strip() == "":
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise DomainError(f"GJQ_THREADS 必须是整数 | value: {raw}")
    if threads < 1:
        raise DomainError(f"GJQ_THREADS 必须 >= 1 | value: {threads}")
    return threads
