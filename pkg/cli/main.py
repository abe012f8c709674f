"""
命令行入口

退出码：0 得到任何判定结果；2 输入错误；3 预算耗尽。
结果 JSON 写到标准输出（或 --output 文件），日志写到标准错误。
"""
import argparse
import sys
from typing import List, Optional

from config.settings import RunConfig, load_solver_config
from separability.cutting_plane import BudgetExhaustedError
from separability.oracle import GridBudgetError, OracleBudgetError
from utils.jsonio import dumps, write_json
from utils.logger import setup_logger

from .commands import COMMANDS, FAMILIES

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="输入 JSON 文件，- 表示标准输入")
    parser.add_argument("--output", help="结果 JSON 写入此文件")
    parser.add_argument("--config", help="求解配置 JSON 文件")
    parser.add_argument("--delta", type=float, help="精度 δ，默认 0.01")
    parser.add_argument("--seed", type=int, help="随机种子，默认 0")
    parser.add_argument("--max-oracle-calls", type=int, help="oracle 调用上限，默认 50·n")
    parser.add_argument("--oracle", choices=["seesaw", "grid"], help="oracle 后端")
    parser.add_argument("--grid-h", type=float, help="认证网格初始步长")
    parser.add_argument("--threads", type=int, help="oracle 多起点并行线程数")
    parser.add_argument("--no-trace", action="store_true", help="输出中省略逐轮迭代记录")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="separability", description="纠缠见证与可分性判定")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    for name, help_text in (
        ("solve", "割平面求解：SEPARABLE 或 ENTANGLED + 见证"),
        ("ppt", "部分转置判据"),
        ("nearest-sep", "Frank–Wolfe 最近可分态与分解"),
        ("bench", "基准实例的判定、oracle 调用次数与耗时"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        _add_common(sub)
        if name == "nearest-sep":
            sub.add_argument("--budget", type=int, help="oracle 调用次数，默认同 --max-oracle-calls")

    check = subparsers.add_parser("witness-check", help="校验给定见证")
    _add_common(check)
    check.add_argument("--witness", required=True, help="见证 JSON（系数、矩阵或 solve 输出）")

    partial = subparsers.add_parser("partial", help="部分信息模式，测量流为 JSON Lines")
    _add_common(partial)
    partial.add_argument("--from-state", help="由已知密度矩阵生成期望值")
    partial.add_argument("--observables", help="配合 --from-state 的泡利串列表，逗号分隔")
    partial.add_argument("--require-local", action="store_true", help="只接受乘积形式的可观测量")

    generate = subparsers.add_parser("generate", help="生成测试态的密度矩阵 JSON")
    _add_common(generate)
    generate.add_argument("--family", required=True, choices=FAMILIES)
    generate.add_argument("--p", type=float, default=0.5, help="werner / isotropic 的混合参数")
    generate.add_argument("--d", type=int, default=3, help="isotropic 的局部维度")
    generate.add_argument("--M", type=int, default=2)
    generate.add_argument("--N", type=int, default=2)
    generate.add_argument("--r", type=int, default=4, help="random-separable 的项数")
    generate.add_argument("--which", default="phi+", help="Bell 态：phi+ / phi- / psi+ / psi-")

    return parser


def _solver_config(args: argparse.Namespace, run_config: RunConfig):
    overrides = {
        "max_oracle_calls": args.max_oracle_calls,
        "oracle": {
            "backend": args.oracle,
            "grid_h": args.grid_h,
            "threads": args.threads,
            "seed": args.seed,
        },
    }
    if args.delta is not None:
        overrides["delta"] = run_config.delta
    if getattr(args, "require_local", False):
        overrides["require_local"] = True
    return load_solver_config(args.config, **overrides)


def _emit(result, output: Optional[str]) -> None:
    text = write_json(result, output) if output else dumps(result)
    print(text)


def run(argv: Optional[List[str]] = None) -> int:
    """
    解析参数并执行子命令

    Returns:
        退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT_ERROR

    output = getattr(args, "output", None)
    try:
        run_config = RunConfig(
            subcommand=args.subcommand,
            input=args.input,
            output=output,
            delta=args.delta if args.delta is not None else 0.01,
            seed=args.seed if args.seed is not None else 0,
        )
        config = _solver_config(args, run_config)
        logger.debug(f"子命令 {args.subcommand}，δ={config.delta}，后端 {config.oracle.backend}")
        result = COMMANDS[args.subcommand](args, config)
    except BudgetExhaustedError as e:
        logger.error(f"{args.subcommand} 预算耗尽：{e}")
        _emit({"error": str(e), "type": type(e).__name__, "partial": e.verdict.to_dict()}, output)
        return EXIT_BUDGET
    except (GridBudgetError, OracleBudgetError) as e:
        logger.error(f"{args.subcommand} 预算耗尽：{e}")
        _emit({"error": str(e), "type": type(e).__name__}, output)
        return EXIT_BUDGET
    except (ValueError, OSError) as e:
        logger.error(f"{args.subcommand} 输入错误：{e}")
        _emit({"error": str(e), "type": type(e).__name__}, None)
        return EXIT_INPUT_ERROR

    _emit(result, output)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
