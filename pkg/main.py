"""
命令行入口

支持的命令：
- nodes:   输出节点
- weights: 输出节点与权重
- rule:    输出完整求积规则（含区域标记）
- eval:    在给定 x 处求多项式及其导数
- check:   与高精度参考解逐节点对比（节点与权重误差表）
- bench:   各阶段耗时

使用方式：
    python main.py nodes --n 25 --alpha 50 --beta 41 --order 0
    python main.py rule --n 1 --alpha 0 --beta 0 --format json
    python main.py check --n 100 --alpha 50 --beta 41 --order 2
"""

import argparse
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
import pandas as pd

from comparison import compare_report
from evaluator import eval_jacobi, eval_jacobi_deriv, eval_v, eval_v_prime
from nodes import all_nodes
from oracle import oracle_eval, oracle_nodes
from params_core import derive_params
from rule_api import METHOD_AUTO, METHOD_ORACLE, QuadratureRule, RuleOptions, gauss_jacobi_rule, setup_logging
from utils.config import get_threads
from utils.exceptions import DomainError, GaussJacobiError, OracleSizeError, RegimeError
from weights import KIND_SCALED, all_weights

logger = logging.getLogger(__name__)

COMMANDS = ("nodes", "weights", "rule", "eval", "check", "bench")
FORMATS = ("csv", "json")
MAX_PLAIN_DIGITS = 17
MAX_ORACLE_DIGITS = 32
RULE_COLUMNS = ["ell", "node", "weight", "weight_scaled", "flag"]

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_DOMAIN = 2
EXIT_ORACLE_SIZE = 3


@dataclass(frozen=True)
class CliConfig:
    command: str
    n: int
    alpha: float
    beta: float
    order: int = 4
    J: int = 3
    format: str = "csv"
    output: Optional[str] = None
    oracle: bool = False
    digits: int = MAX_PLAIN_DIGITS
    x: tuple[float, ...] = field(default_factory=tuple)
    threads: Optional[int] = None
    debug: bool = False


def parse_args(argv: Optional[list[str]] = None) -> CliConfig:
    """解析命令行参数"""
    parser = argparse.ArgumentParser(
        description="Gauss–Jacobi 求积（大参数渐近展开）",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  python main.py nodes --n 25 --alpha 50 --beta 41 --order 0
  python main.py rule --n 1 --alpha 0 --beta 0 --format json
  python main.py eval --n 125 --alpha 90 --beta 75 --x 0 0.5
  python main.py check --n 100 --alpha 50 --beta 41 --order 2 --output check.csv
        """
    )
    parser.add_argument("command", choices=COMMANDS, help="要执行的命令")
    parser.add_argument("--n", type=int, required=True, help="多项式次数（节点个数）")
    parser.add_argument("--alpha", type=float, required=True, help="参数 α (> -1)")
    parser.add_argument("--beta", type=float, required=True, help="参数 β (> -1)")
    parser.add_argument("--order", type=int, default=4, choices=(0, 2, 4),
                        help="节点修正阶数 (默认: 4)")
    parser.add_argument("--J", type=int, default=3, help="级数截断阶数 (默认: 3)")
    parser.add_argument("--format", choices=FORMATS, default="csv", help="输出格式 (默认: csv)")
    parser.add_argument("--output", type=str, default=None, help="输出文件，缺省写到标准输出")
    parser.add_argument("--oracle", action="store_true", help="使用高精度参考解")
    parser.add_argument("--digits", type=int, default=MAX_PLAIN_DIGITS,
                        help="输出有效数字 (默认: 17，参考解最多 32)")
    parser.add_argument("--x", type=float, nargs="*", default=[], help="eval 命令的求值点")
    parser.add_argument("--threads", type=int, default=None,
                        help="并行线程数 (默认: 读取 GJQ_THREADS)")
    parser.add_argument("--debug", action="store_true", help="启用调试日志")

    args = parser.parse_args(argv)
    return CliConfig(
        command=args.command,
        n=args.n,
        alpha=args.alpha,
        beta=args.beta,
        order=args.order,
        J=args.J,
        format=args.format,
        output=args.output,
        oracle=args.oracle,
        digits=args.digits,
        x=tuple(args.x),
        threads=args.threads,
        debug=args.debug,
    )


def _validate(config: CliConfig) -> None:
    limit = MAX_ORACLE_DIGITS if config.oracle else MAX_PLAIN_DIGITS
    if not 1 <= config.digits <= limit:
        raise DomainError(f"输出位数超出范围 | digits: {config.digits}, 上限: {limit}")
    if config.threads is not None and config.threads < 1:
        raise DomainError(f"线程数必须 >= 1 | threads: {config.threads}")
    if config.command == "eval" and not config.x:
        raise DomainError("eval 命令需要 --x")


def _threads(config: CliConfig) -> int:
    return config.threads if config.threads is not None else get_threads()


def _rule_options(config: CliConfig) -> RuleOptions:
    return RuleOptions(
        order=config.order,
        J=config.J,
        method=METHOD_ORACLE if config.oracle else METHOD_AUTO,
        threads=_threads(config),
    )


def _emit(text: str, config: CliConfig) -> None:
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.info(f"结果已写入 | 文件: {config.output}")
    else:
        sys.stdout.write(text)


def rule_frame(rule: QuadratureRule) -> pd.DataFrame:
    return pd.DataFrame({
        "ell": np.arange(1, len(rule) + 1),
        "node": rule.nodes,
        "weight": rule.weights_classical,
        "weight_scaled": rule.weights_scaled,
        "flag": list(rule.meta.flags),
    })


def write_rule_csv(rule: QuadratureRule, path_or_buf=None, digits: int = MAX_PLAIN_DIGITS,
                   columns: Optional[list[str]] = None):
    """表头 + 每行一个节点，'.' 小数点，digits 位有效数字"""
    frame = rule_frame(rule)[columns or RULE_COLUMNS]
    return frame.to_csv(path_or_buf, index=False, float_format=f"%.{digits}g")


def read_rule_csv(path_or_buf) -> pd.DataFrame:
    """按 round-trip 精度读回 CSV"""
    return pd.read_csv(path_or_buf, float_precision="round_trip")


def _json_list(values) -> list:
    return [None if isinstance(v, float) and math.isnan(v) else v for v in (float(x) for x in values)]


def rule_json(config: CliConfig, nodes=(), weights=(), weights_scaled=(), flags=()) -> str:
    payload = {
        "n": config.n,
        "alpha": config.alpha,
        "beta": config.beta,
        "order": config.order,
        "J": config.J,
        "nodes": _json_list(nodes),
        "weights": _json_list(weights),
        "weights_scaled": _json_list(weights_scaled),
        "flags": list(flags),
    }
    return json.dumps(payload, ensure_ascii=False) + "\n"


def _oracle_node_strings(config: CliConfig) -> list[str]:
    reference = oracle_nodes(config.n, config.alpha, config.beta)
    with mpmath.workdps(MAX_ORACLE_DIGITS + 8):
        return [mpmath.nstr(x, config.digits, strip_zeros=False) for x in reference.to_mpf()]


def run_rule_command(config: CliConfig) -> str:
    """nodes / weights / rule 三个命令共用"""
    rule = gauss_jacobi_rule(config.n, config.alpha, config.beta, _rule_options(config))
    columns = {
        "nodes": ["ell", "node", "flag"],
        "weights": ["ell", "node", "weight", "weight_scaled"],
        "rule": RULE_COLUMNS,
    }[config.command]

    if config.format == "json":
        with_weights = config.command != "nodes"
        return rule_json(
            config,
            nodes=rule.nodes,
            weights=rule.weights_classical if with_weights else (),
            weights_scaled=rule.weights_scaled if with_weights else (),
            flags=rule.meta.flags if config.command != "weights" else (),
        )
    if config.oracle and config.digits > MAX_PLAIN_DIGITS:
        frame = rule_frame(rule)[columns].copy()
        frame["node"] = _oracle_node_strings(config)
        return frame.to_csv(index=False, float_format=f"%.{MAX_PLAIN_DIGITS}g")
    return write_rule_csv(rule, None, config.digits, columns)


def run_eval_command(config: CliConfig) -> str:
    xs = np.array(config.x, dtype=float)
    if config.oracle:
        value = oracle_eval(config.n, config.alpha, config.beta, xs)
        with mpmath.workdps(MAX_ORACLE_DIGITS + 8):
            frame = pd.DataFrame({
                "x": [repr(float(x)) for x in xs],
                "value": [mpmath.nstr(v, config.digits) for v in value.value_mpf()],
                "derivative": [mpmath.nstr(d, config.digits) for d in value.derivative_mpf()],
            })
    else:
        p = derive_params(config.n, config.alpha, config.beta)
        frame = pd.DataFrame({
            "x": xs,
            "value": np.atleast_1d(eval_jacobi(p, xs, config.J).value),
            "derivative": np.atleast_1d(eval_jacobi_deriv(p, xs, config.J)),
            "v": np.atleast_1d(eval_v(p, xs, config.J)),
            "v_prime": np.atleast_1d(eval_v_prime(p, xs, config.J)),
        })
    if config.format == "json":
        return frame.to_json(orient="records", double_precision=15) + "\n"
    return frame.to_csv(index=False, float_format=f"%.{config.digits}g")


def run_check_command(config: CliConfig) -> str:
    p = derive_params(config.n, config.alpha, config.beta)
    report = compare_report(p, config.order, config.J, _threads(config))
    logger.info(f"对比摘要 | {report.summary()}")
    if config.format == "json":
        return json.dumps(report.to_dict()) + "\n"
    return report.to_csv(None, config.digits)


def run_bench_command(config: CliConfig) -> str:
    """各阶段耗时：参数推导、节点、权重"""
    timings = []
    start = time.perf_counter()
    p = derive_params(config.n, config.alpha, config.beta)
    timings.append(("params", time.perf_counter() - start))

    start = time.perf_counter()
    estimates = all_nodes(p, config.order, config.J, _threads(config))
    timings.append(("nodes", time.perf_counter() - start))

    start = time.perf_counter()
    all_weights(p, np.array([e.value for e in estimates]), config.J, KIND_SCALED)
    timings.append(("weights", time.perf_counter() - start))

    frame = pd.DataFrame(timings, columns=["phase", "seconds"])
    frame["per_node_seconds"] = frame["seconds"] / max(p.n, 1)
    if config.format == "json":
        return frame.to_json(orient="records") + "\n"
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.6g")
    return buffer.getvalue()


def run(config: CliConfig) -> int:
    """执行命令并返回退出码：0 成功，2 参数错误，3 参考解规模超限，1 其他异常"""
    try:
        _validate(config)
        if config.command in ("nodes", "weights", "rule"):
            text = run_rule_command(config)
        elif config.command == "eval":
            text = run_eval_command(config)
        elif config.command == "check":
            text = run_check_command(config)
        else:
            text = run_bench_command(config)
        _emit(text, config)
        return EXIT_OK
    except OracleSizeError as e:
        logger.error(f"参考解规模超限: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ORACLE_SIZE
    except (DomainError, RegimeError) as e:
        logger.error(f"参数错误: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except GaussJacobiError as e:
        logger.exception(f"计算失败: {e}")
        return EXIT_UNEXPECTED
    except Exception as e:
        logger.exception(f"程序异常退出: {e}")
        return EXIT_UNEXPECTED


def main():
    """主函数"""
    config = parse_args()
    setup_logging()

    # 设置日志级别
    if config.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.info("调试模式已启用")

    logger.info("=" * 60)
    logger.info("Gauss–Jacobi 求积")
    logger.info(f"命令: {config.command}")
    logger.info(f"参数: n={config.n}, alpha={config.alpha}, beta={config.beta}, "
                f"order={config.order}, J={config.J}")
    logger.info("=" * 60)

    sys.exit(run(config))


if __name__ == "__main__":
    main()
