"""同步更新的粒子群主循环

每一步:
  1. 按拓扑为所有粒子确定 lbest (拓扑的随机数先于更新的随机数);
  2. 逐粒子逐分量抽取 phi_i, phi_s, 用 t 时刻的 pbest / lbest 更新速度和位置;
  3. 所有位置更新完之后再评估; 越界粒子不评估, 但照常运动;
  4. 严格更优时才更新 pbest, 然后重新确定 gbest。
"""
import logging
from typing import Iterable, List, Optional

import numpy as np

from benchmarks import error_of, evaluate_feasible
from coefficients import CoefficientTable, resolve, sample_phi_matrix
from config import SwarmConfig
from initialization import InitConfig, init_swarm
from metrics import PbMeWindow, pb_me
from models import (
    BenchmarkProblem,
    RunRecord,
    SchemeSpec,
    StepRecord,
    SwarmDomainError,
    SwarmState,
    Topology,
)
from topology import lbest_indices, validate_topology

logger = logging.getLogger(__name__)


def default_checkpoints(T: int) -> List[int]:
    """默认在第 1000 步和最后一步汇报; T = 0 时只有初始化"""
    if T == 0:
        return [0]
    return sorted({c for c in (SwarmConfig.INTERMEDIATE_CHECKPOINT, T) if 1 <= c <= T})


def multi_swarm_assign(m: int, n_schemes: int = 3) -> np.ndarray:
    """连续分块, 块大小尽量相等 (多出的粒子给前面的块), 如 m=50 -> 17/17/16"""
    if m < 3 or m < n_schemes:
        raise SwarmDomainError(f"m={m} 不足以分给 {n_schemes} 个方案")
    base, extra = divmod(m, n_schemes)
    sizes = [base + (1 if b < extra else 0) for b in range(n_schemes)]
    return np.repeat(np.arange(n_schemes), sizes)


def coefficient_table(scheme: SchemeSpec, tags: np.ndarray) -> CoefficientTable:
    resolved = [resolve(s) for s in scheme.schemes]
    return CoefficientTable.from_resolved([resolved[tag] for tag in tags])


def step(state: SwarmState, topo: Topology, problem: BenchmarkProblem,
         coefficients: CoefficientTable, T: int, rng: np.random.Generator) -> SwarmState:
    if state.t >= T:
        raise SwarmDomainError(f"已到达最后一步: t={state.t}, T={T}")
    topo = validate_topology(topo, state.m)

    lbest = lbest_indices(topo, state.pbest_conflicts, state.t, T, rng)
    phi_i, phi_s = sample_phi_matrix(coefficients, state.n, rng)

    x = state.positions
    velocities = (coefficients.w * state.velocities
                  + phi_i * (state.pbest_positions - x)
                  + phi_s * (state.pbest_positions[lbest] - x))
    positions = x + velocities

    conflicts = evaluate_feasible(problem, positions)
    improved = conflicts < state.pbest_conflicts
    pbest_positions = np.where(improved[:, None], positions, state.pbest_positions)
    pbest_conflicts = np.where(improved, conflicts, state.pbest_conflicts)

    gbest = int(np.argmin(pbest_conflicts))
    return SwarmState(
        t=state.t + 1,
        positions=positions,
        velocities=velocities,
        pbest_positions=pbest_positions,
        pbest_conflicts=pbest_conflicts,
        scheme_tags=state.scheme_tags,
        gbest_index=gbest,
        gbest_conflict=float(pbest_conflicts[gbest]),
    )


def _snapshot(state: SwarmState) -> StepRecord:
    return StepRecord(
        t=state.t,
        gbest_conflict=state.gbest_conflict,
        gbest_position=state.gbest_position,
        positions=state.positions,
    )


def run(problem: BenchmarkProblem, topo: Topology, scheme: SchemeSpec, m: int, T: int,
        rng: np.random.Generator,
        lhs_candidates: int = SwarmConfig.LHS_CANDIDATES,
        t_ref: int = SwarmConfig.T_REF,
        checkpoints: Optional[Iterable[int]] = None) -> RunRecord:
    """一次完整运行: 初始化 + T 步, 记录每步 gbest 误差和检查点的 pb_me"""
    if T < 0:
        raise SwarmDomainError(f"时间步数不能为负: T={T}")
    topo = validate_topology(topo, m)
    marks = sorted(set(default_checkpoints(T) if checkpoints is None else checkpoints))
    if any(not 0 <= c <= T for c in marks):
        raise SwarmDomainError(f"检查点必须在 [0, {T}] 内: {marks}")

    if scheme.is_multi_swarm:
        tags = multi_swarm_assign(m, len(scheme.schemes))
        sizes = np.bincount(tags).tolist()
    else:
        tags = np.zeros(m, dtype=int)
        sizes = None
    table = coefficient_table(scheme, tags)

    state = init_swarm(InitConfig.for_problem(m, problem, lhs_candidates), problem, rng, sizes, tags)
    window = PbMeWindow(t_ref)
    window.push(_snapshot(state))

    errors = np.empty(T + 1)
    errors[0] = error_of(problem, state.gbest_conflict)
    checkpoint_errors, checkpoint_pb_me = {}, {}

    def mark():
        if state.t in marks:
            checkpoint_errors[state.t] = float(errors[state.t])
            checkpoint_pb_me[state.t] = pb_me(window, problem.lower, problem.upper)

    mark()
    for _ in range(T):
        state = step(state, topo, problem, table, T, rng)
        errors[state.t] = error_of(problem, state.gbest_conflict)
        window.push(_snapshot(state))
        mark()

    logger.debug("运行结束: %s %dD %s, 最终误差 %.3e", problem.name.value, problem.n, scheme.label, errors[-1])
    return RunRecord(
        errors=errors,
        checkpoint_errors=checkpoint_errors,
        checkpoint_pb_me=checkpoint_pb_me,
        final_state=state,
    )
