"""粒子群初始化

1. 生成 lhs_candidates 个拉丁超立方样本, 取最小点间距最大的一个;
2. 速度为零;
3. pbest 放在距粒子每个分量 (upper - lower) / (2 * 子群规模) 处, 方向随机;
4. p 与 pbest 中较好的一个作为 pbest。
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from benchmarks import evaluate_feasible
from config import SwarmConfig
from models import BenchmarkProblem, SwarmDomainError, SwarmState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InitConfig:
    m: int
    n: int
    lower: np.ndarray
    upper: np.ndarray
    lhs_candidates: int = SwarmConfig.LHS_CANDIDATES

    def __post_init__(self):
        if self.m < 3:
            raise SwarmDomainError(f"群规模至少为 3: m={self.m}")
        if self.lhs_candidates < 1:
            raise SwarmDomainError(f"lhs_candidates 至少为 1: {self.lhs_candidates}")

    @classmethod
    def for_problem(cls, m: int, problem: BenchmarkProblem,
                    lhs_candidates: int = SwarmConfig.LHS_CANDIDATES) -> "InitConfig":
        return cls(m=m, n=problem.n, lower=problem.lower, upper=problem.upper, lhs_candidates=lhs_candidates)


def latin_hypercube(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """单位立方体内的 m×n 拉丁超立方样本; 每列在每个分层 [k/m, (k+1)/m) 恰有一点"""
    if m < 1 or n < 1:
        raise SwarmDomainError(f"LHS 需要 m >= 1 且 n >= 1: m={m}, n={n}")
    strata = np.tile(np.arange(m)[:, None], (1, n))
    return (rng.permuted(strata, axis=0) + rng.random((m, n))) / m


def min_distance(sample: np.ndarray) -> float:
    if sample.shape[0] < 2:
        return np.inf
    return float(pdist(sample).min())


def maximin_select(candidates: Sequence[np.ndarray]) -> np.ndarray:
    """最小点间距最大的候选; 并列时取第一个"""
    if len(candidates) == 0:
        raise SwarmDomainError("maximin_select 需要至少一个候选样本")
    scores = [min_distance(c) for c in candidates]
    return candidates[int(np.argmax(scores))]


def _init_block(cfg: InitConfig, size: int, problem: BenchmarkProblem, rng: np.random.Generator):
    width = cfg.upper - cfg.lower
    # 在物理空间中比较距离
    candidates = [cfg.lower + latin_hypercube(size, cfg.n, rng) * width for _ in range(cfg.lhs_candidates)]
    positions = maximin_select(candidates)

    signs = rng.integers(0, 2, size=(size, cfg.n)) * 2 - 1
    pbest = positions + signs * width / (2 * size)

    p_conf = evaluate_feasible(problem, positions)
    pbest_conf = evaluate_feasible(problem, pbest)
    swap = p_conf < pbest_conf
    if swap.any():
        positions[swap], pbest[swap] = pbest[swap].copy(), positions[swap].copy()
        p_conf[swap], pbest_conf[swap] = pbest_conf[swap], p_conf[swap]
    return positions, pbest, pbest_conf


def init_swarm(cfg: InitConfig, problem: BenchmarkProblem, rng: np.random.Generator,
               block_sizes: Optional[List[int]] = None,
               scheme_tags: Optional[np.ndarray] = None) -> SwarmState:
    """构造初始粒子群; 多群时每个子群 (block) 独立初始化"""
    sizes = block_sizes or [cfg.m]
    if sum(sizes) != cfg.m:
        raise SwarmDomainError(f"子群规模之和 {sum(sizes)} 不等于 m={cfg.m}")

    blocks = [_init_block(cfg, size, problem, rng) for size in sizes]
    positions = np.vstack([b[0] for b in blocks])
    pbest = np.vstack([b[1] for b in blocks])
    pbest_conf = np.concatenate([b[2] for b in blocks])

    gbest = int(np.argmin(pbest_conf))
    logger.debug("初始化完成: m=%d, n=%d, 子群 %s, gbest=%.3e", cfg.m, cfg.n, sizes, pbest_conf[gbest])
    return SwarmState(
        t=0,
        positions=positions,
        velocities=np.zeros_like(positions),
        pbest_positions=pbest,
        pbest_conflicts=pbest_conf,
        scheme_tags=np.zeros(cfg.m, dtype=int) if scheme_tags is None else np.asarray(scheme_tags, dtype=int),
        gbest_index=gbest,
        gbest_conflict=float(pbest_conf[gbest]),
    )
