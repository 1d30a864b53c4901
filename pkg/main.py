"""命令行入口

  python main.py run --problem sphere --dims 2 --scheme c-pso-1 --topology global --seed 1
  python main.py run --config experiment.json
  python main.py grid paper-grid --out-dir results/
  python main.py grid my_grid.json --threads 4
  python main.py table --store results/reports.db --problem sphere --dims 2
  python main.py curves --store results/reports.db --out curves.csv
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from config import SwarmConfig, threads_from_env
from database import SQLiteReportStore
from harness import (
    RNG_POLICY_NOTES,
    ExperimentConfig,
    ExperimentReport,
    load_config,
    load_grid,
    make_config,
    full_grid,
    run_grid,
)
from models import ConfigError, ExperimentFailure, SwarmDomainError
from tables import curves_frame, group_reports, render_table

logger = logging.getLogger(__name__)

FULL_GRID_PRESET = "paper-grid"

# 与 ExperimentConfig 字段同名的命令行参数
_FLAG_FIELDS = (
    "problem", "dims", "topology", "scheme", "swarm_size", "steps", "runs",
    "seed", "t_ref", "lhs_candidates", "checkpoints", "rng_policy",
)


def _checkpoint_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"检查点应为逗号分隔的整数: {text}")


def _add_experiment_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--problem", help="sphere / rosenbrock / rastrigin / griewank / schaffer-f6")
    parser.add_argument("--dims", type=int)
    parser.add_argument("--topology", help="global, ring:nn=2, ring-dynamic:nni=2,nnf=m-1, wheel, random")
    parser.add_argument("--scheme", help="c-pso-1, pso-rrr1-1, pso-rrr2-1, multi-swarm, rrr1:aw=1.8,ip=0.5 ...")
    parser.add_argument("--swarm-size", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--runs", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--t-ref", type=int)
    parser.add_argument("--lhs-candidates", type=int)
    parser.add_argument("--checkpoints", type=_checkpoint_list, help="例如 1000,10000")
    parser.add_argument("--rng-policy", choices=["continuous", "split"])
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--threads", type=int, help=f"默认读取环境变量 {SwarmConfig.THREADS_ENV}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarm-topo", description="粒子群拓扑与系数方案实验")
    parser.add_argument("--verbose", "-v", action="store_true", help="输出 DEBUG 日志")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="运行单个实验")
    run_p.add_argument("--config", help="JSON 实验配置文件, 命令行参数会覆盖其中的字段")
    _add_experiment_flags(run_p)

    grid_p = sub.add_parser("grid", help="运行实验网格")
    grid_p.add_argument("source", help=f"'{FULL_GRID_PRESET}' 或 JSON 网格文件")
    _add_experiment_flags(grid_p)

    table_p = sub.add_parser("table", help="从报告库重新生成统计表")
    table_p.add_argument("--store", required=True)
    table_p.add_argument("--problem")
    table_p.add_argument("--dims", type=int)
    table_p.add_argument("--out")

    curves_p = sub.add_parser("curves", help="导出收敛曲线数据")
    curves_p.add_argument("--store", required=True)
    curves_p.add_argument("--problem")
    curves_p.add_argument("--dims", type=int)
    curves_p.add_argument("--out")
    return parser


def _flag_overrides(args: argparse.Namespace) -> Dict:
    return {name: getattr(args, name) for name in _FLAG_FIELDS if getattr(args, name) is not None}


def _configs_for(args: argparse.Namespace) -> List[ExperimentConfig]:
    overrides = _flag_overrides(args)
    if args.command == "run":
        if args.config:
            base = load_config(args.config).model_dump(exclude_unset=True)
            return [make_config(**{**base, **overrides})]
        if "problem" not in overrides or "dims" not in overrides:
            raise ConfigError("run 需要 --problem 和 --dims, 或者 --config")
        return [make_config(**overrides)]

    if args.source == FULL_GRID_PRESET:
        return full_grid(**{k: v for k, v in overrides.items() if k not in ("problem", "dims", "scheme", "topology")})
    grid = load_grid(args.source)
    if overrides:
        grid = [make_config(**{**cfg.model_dump(exclude_unset=True), **overrides}) for cfg in grid]
    return grid


def _clear_previous_bundle(out: Path):
    """删除上一次写出的统计表、曲线和报告库, 避免新旧结果混在一起"""
    stale = [*out.glob("table_*.csv"), *out.glob("curves_*.csv"), out / SwarmConfig.STORE_FILENAME]
    removed = 0
    for path in stale:
        if path.exists():
            path.unlink()
            removed += 1
    if removed:
        logger.info("已清除 %s 中 %d 个旧文件", out, removed)


def write_bundle(results: Sequence[Union[ExperimentReport, ExperimentFailure]],
                 configs: Sequence[ExperimentConfig], out_dir: Union[str, Path]) -> List[Path]:
    """写出统计表、收敛曲线、manifest、用时和报告库; 返回写出的文件

    输出目录中旧的统计表、曲线和报告库会先被删除。
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _clear_previous_bundle(out)
    reports = [r for r in results if isinstance(r, ExperimentReport)]
    failures = [r for r in results if isinstance(r, ExperimentFailure)]

    written: List[Path] = []
    for k, ((problem, dims), group) in enumerate(group_reports(reports).items(), start=1):
        stem = f"{k:02d}_{problem}_{dims}d"
        table_path = out / f"table_{stem}.csv"
        table_path.write_text(render_table(group), encoding="utf-8")
        curves_path = out / f"curves_{stem}.csv"
        curves_frame(group).to_csv(curves_path, lineterminator="\n")
        written += [table_path, curves_path]

    manifest = {
        "artifact_version": SwarmConfig.ARTIFACT_VERSION,
        "config_format": SwarmConfig.CONFIG_FORMAT,
        "seed": sorted({cfg.seed for cfg in configs}),
        "rng_streams": {policy: RNG_POLICY_NOTES[policy] for policy in sorted({cfg.rng_policy for cfg in configs})},
        "experiments": [cfg.model_dump() for cfg in configs],
        "files": [p.name for p in written],
        "failures": [{"config": f.config, "error": f.error} for f in failures],
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")

    timings = {
        "experiments": [
            {"problem": r.config.problem, "dims": r.config.dims, "label": r.label, "elapsed": r.elapsed}
            for r in reports
        ],
        "total": sum(r.elapsed for r in reports),
    }
    timings_path = out / "timings.json"
    timings_path.write_text(json.dumps(timings, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")

    store = SQLiteReportStore(str(out / SwarmConfig.STORE_FILENAME))
    for report in reports:
        store.add_report(report)
    logger.info("已写入 %d 个报告到 %s", len(reports), store.db_path)

    return written + [manifest_path, timings_path, Path(store.db_path)]


def _execute(args: argparse.Namespace) -> int:
    configs = _configs_for(args)
    threads = args.threads if args.threads is not None else threads_from_env()
    if threads < 1:
        raise ConfigError(f"--threads 至少为 1: {threads}")

    logger.info("共 %d 个实验, %d 个线程", len(configs), threads)
    results = run_grid(configs, threads=threads)
    paths = write_bundle(results, configs, args.out_dir)

    for path in paths:
        print(f"✓ {path}")
    failed = [r for r in results if isinstance(r, ExperimentFailure)]
    if len(configs) == 1 and not failed:
        print(render_table(results), end="")
    if failed:
        print(f"⚠ {len(failed)} 个实验失败, 详见 manifest.json")
        return 1
    return 0


def _stored_reports(args: argparse.Namespace) -> Optional[List[ExperimentReport]]:
    if not os.path.exists(args.store):
        print(f"❌ 报告库不存在: {args.store}", file=sys.stderr)
        return None
    reports = SQLiteReportStore(args.store).list_reports(args.problem, args.dims)
    if not reports:
        print("❌ 报告库中没有匹配的报告", file=sys.stderr)
        return None
    return reports


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"✓ {out}")
    else:
        print(text, end="")


def _table(args: argparse.Namespace) -> int:
    reports = _stored_reports(args)
    if reports is None:
        return 1
    _emit(render_table(reports), args.out)
    return 0


def _curves(args: argparse.Namespace) -> int:
    reports = _stored_reports(args)
    if reports is None:
        return 1
    _emit(curves_frame(reports).to_csv(lineterminator="\n"), args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(levelname)s] %(name)s: %(message)s",
    )

    handlers = {"run": _execute, "grid": _execute, "table": _table, "curves": _curves}
    try:
        return handlers[args.command](args)
    except (ConfigError, SwarmDomainError) as e:
        print(f"❌ 配置错误: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"❌ 文件错误: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
