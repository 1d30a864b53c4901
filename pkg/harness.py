"""实验编排: 单个实验 (25 次运行) 与实验网格

随机数策略: 每个实验只在第一次运行前用 seed 初始化一次。
  continuous  一个 Generator 依次被所有运行连续消耗 (默认), 运行之间只能串行
  split       实验 Generator 为每次运行派生一个子 Generator, 可并行且结果与线程数无关;
              这是另一组随机数, 结果与 continuous 不同
"""
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from benchmarks import make_problem
from coefficients import parse_scheme
from config import SwarmConfig
from metrics import summarize
from models import ConfigError, ExperimentFailure, ProblemName, RunSummary, SwarmDomainError
from swarm_engine import default_checkpoints, run
from topology import parse_topology, topology_label, validate_topology

logger = logging.getLogger(__name__)

GRID_PROBLEMS = ("sphere", "rosenbrock", "rastrigin", "griewank", "schaffer-f6")
GRID_DIMS = (2, 10, 30)
GRID_SCHEMES = ("pso-rrr2-1", "pso-rrr1-1", "c-pso-1", "multi-swarm")
GRID_TOPOLOGIES = ("global", "ring:nn=2", "ring-dynamic:nni=2,nnf=m-1", "wheel", "random")

BoundOverride = Union[float, List[float], None]

# 写入 manifest, 说明各随机数策略的含义
RNG_POLICY_NOTES = {
    "continuous": "default_rng(seed) 依次供所有运行连续使用; 运行串行执行",
    "split": "default_rng(seed).spawn(runs) 为每次运行派生独立子流; 与 continuous 的结果不同, 与线程数无关",
}


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    problem: str
    dims: int = Field(ge=1)
    topology: str = "global"
    scheme: str = "c-pso-1"
    swarm_size: int = Field(SwarmConfig.SWARM_SIZE, ge=3)
    steps: int = Field(SwarmConfig.TIME_STEPS, ge=0)
    runs: int = Field(SwarmConfig.RUNS, ge=1)
    seed: int = SwarmConfig.DEFAULT_SEED
    checkpoints: Optional[List[int]] = None
    t_ref: int = Field(SwarmConfig.T_REF, ge=1)
    lhs_candidates: int = Field(SwarmConfig.LHS_CANDIDATES, ge=1)
    threshold: float = Field(SwarmConfig.SUCCESS_THRESHOLD, gt=0)
    rng_policy: Literal["continuous", "split"] = "continuous"
    lower: BoundOverride = None
    upper: BoundOverride = None
    history_stride: int = Field(SwarmConfig.HISTORY_STRIDE, ge=1)

    @field_validator("problem")
    @classmethod
    def _known_problem(cls, value: str) -> str:
        value = value.strip().lower()
        ProblemName(value)
        return value

    @field_validator("topology")
    @classmethod
    def _parsable_topology(cls, value: str) -> str:
        parse_topology(value)
        return value.strip().lower()

    @field_validator("scheme")
    @classmethod
    def _parsable_scheme(cls, value: str) -> str:
        parse_scheme(value)
        return value.strip().lower()

    @model_validator(mode="after")
    def _consistent(self):
        validate_topology(parse_topology(self.topology), self.swarm_size)
        if parse_scheme(self.scheme).is_multi_swarm and self.swarm_size < 3:
            raise ValueError("多群至少需要 3 个粒子")
        make_problem(self.problem, self.dims, self.lower, self.upper)
        if self.checkpoints is not None:
            if not self.checkpoints:
                raise ValueError("checkpoints 不能为空列表")
            low = 0 if self.steps == 0 else 1
            bad = [c for c in self.checkpoints if not low <= c <= self.steps]
            if bad:
                raise ValueError(f"检查点 {bad} 超出 [{low}, {self.steps}]")
        return self

    def resolved_checkpoints(self) -> List[int]:
        if self.checkpoints is None:
            return default_checkpoints(self.steps)
        return sorted(set(self.checkpoints))

    @property
    def scheme_label(self) -> str:
        return parse_scheme(self.scheme).label

    @property
    def topology_label(self) -> str:
        return topology_label(parse_topology(self.topology))

    @property
    def label(self) -> str:
        return f"{self.scheme_label} {self.topology_label}"


def make_config(**fields) -> ExperimentConfig:
    """构造配置; pydantic 的校验错误统一转换成 ConfigError"""
    try:
        return ExperimentConfig(**fields)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def thinned_steps(T: int, stride: int) -> np.ndarray:
    """每 stride 步取一个, 始终包含最后一步"""
    return np.unique(np.append(np.arange(0, T + 1, stride), T))


@dataclass(eq=False)
class ExperimentReport:
    config: ExperimentConfig
    checkpoints: List[int]
    summaries: Dict[int, RunSummary]
    steps_index: np.ndarray  # error_histories / curve 各列对应的时间步
    error_histories: np.ndarray  # runs × len(steps_index)
    pb_me: np.ndarray  # runs × len(checkpoints)
    curve: np.ndarray  # 各步平均最优 conflict
    elapsed: float = 0.0

    @property
    def label(self) -> str:
        return self.config.label

    def to_dict(self, stride: Optional[int] = None):
        stride = self.config.history_stride if stride is None else stride
        keep = np.isin(self.steps_index, thinned_steps(int(self.steps_index[-1]), stride))
        return {
            'config': self.config.model_dump(),
            'checkpoints': self.checkpoints,
            'summaries': {str(c): s.to_dict() for c, s in self.summaries.items()},
            'steps_index': self.steps_index[keep].tolist(),
            'error_histories': self.error_histories[:, keep].tolist(),
            'pb_me': self.pb_me.tolist(),
            'curve': self.curve[keep].tolist(),
            'elapsed': self.elapsed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        return cls(
            config=ExperimentConfig.model_validate(data['config']),
            checkpoints=[int(c) for c in data['checkpoints']],
            summaries={int(c): RunSummary(**s) for c, s in data['summaries'].items()},
            steps_index=np.asarray(data['steps_index'], dtype=int),
            error_histories=np.asarray(data['error_histories'], dtype=float),
            pb_me=np.asarray(data['pb_me'], dtype=float),
            curve=np.asarray(data['curve'], dtype=float),
            elapsed=float(data.get('elapsed', 0.0)),
        )


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """执行一个实验的全部运行, 并在每个检查点汇总"""
    started = time.perf_counter()
    problem = make_problem(cfg.problem, cfg.dims, cfg.lower, cfg.upper)
    topo = parse_topology(cfg.topology)
    scheme = parse_scheme(cfg.scheme)
    marks = cfg.resolved_checkpoints()
    logger.info("开始实验: %s %dD %s (%d 次运行, %d 步)", cfg.problem, cfg.dims, cfg.label, cfg.runs, cfg.steps)

    rng = np.random.default_rng(cfg.seed)

    def one_run(stream: np.random.Generator):
        return run(problem, topo, scheme, cfg.swarm_size, cfg.steps, stream,
                   lhs_candidates=cfg.lhs_candidates, t_ref=cfg.t_ref, checkpoints=marks)

    if cfg.rng_policy == "continuous":
        if threads > 1:
            logger.info("continuous 策略下运行共用一个随机数流, 忽略 %d 个线程, 串行执行", threads)
        records = [one_run(rng) for _ in range(cfg.runs)]
    else:
        streams = rng.spawn(cfg.runs)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(one_run, streams))
        else:
            records = [one_run(s) for s in streams]

    histories = np.vstack([r.errors for r in records])
    pb_me = np.array([[r.checkpoint_pb_me[c] for c in marks] for r in records])
    summaries = {
        c: summarize(histories[:, c], pb_me[:, k], cfg.threshold, report_success=(c == cfg.steps))
        for k, c in enumerate(marks)
    }
    elapsed = time.perf_counter() - started
    final = summaries[marks[-1]]
    logger.info("实验结束: %s %dD %s, mean=%.3e, success=%s, 用时 %.1fs",
                cfg.problem, cfg.dims, cfg.label, final.mean, final.success_rate, elapsed)
    return ExperimentReport(
        config=cfg,
        checkpoints=marks,
        summaries=summaries,
        steps_index=np.arange(cfg.steps + 1),
        error_histories=histories,
        pb_me=pb_me,
        curve=histories.mean(axis=0) + problem.optimum_conflict,
        elapsed=elapsed,
    )


def _guarded(cfg: ExperimentConfig, threads: int = 1) -> Union[ExperimentReport, ExperimentFailure]:
    try:
        return run_experiment(cfg, threads)
    except Exception as e:
        logger.error("实验失败: %s %dD %s: %s", cfg.problem, cfg.dims, cfg.label, e)
        return ExperimentFailure(config=cfg.model_dump(), error=f"{type(e).__name__}: {e}")


def run_grid(grid: Sequence[ExperimentConfig], threads: int = 1) -> List[Union[ExperimentReport, ExperimentFailure]]:
    """独立执行每个实验, 结果按输入顺序返回; 单个实验失败不会中断整个网格

    只有一个实验时线程交给实验内部的运行 (split 策略), 否则在实验之间并行。
    """
    if not grid:
        raise SwarmDomainError("实验网格为空")
    if len(grid) == 1:
        return [_guarded(grid[0], threads)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_guarded, grid))
    return [_guarded(cfg) for cfg in grid]


def full_grid(**overrides) -> List[ExperimentConfig]:
    """5 个函数 × 3 个维数 × 4 种系数 × 5 种拓扑 = 300 个实验, 顺序与统计表一致"""
    return [
        make_config(problem=problem, dims=dims, scheme=scheme, topology=topology, **overrides)
        for problem in GRID_PROBLEMS
        for dims in GRID_DIMS
        for scheme in GRID_SCHEMES
        for topology in GRID_TOPOLOGIES
    ]


def _read_json(path: Union[str, Path]):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件不是合法的 JSON: {path}: {e}") from e


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"实验配置必须是 JSON 对象: {path}")
    return make_config(**data)


def load_grid(path: Union[str, Path]) -> List[ExperimentConfig]:
    """{"defaults": {...}, "experiments": [{...}, ...]}; 每项覆盖 defaults"""
    data = _read_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("experiments"), list):
        raise ConfigError(f"网格配置需要 'experiments' 列表: {path}")
    defaults = data.get("defaults", {})
    return [make_config(**{**defaults, **entry}) for entry in data["experiments"]]
