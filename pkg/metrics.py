"""pb_me (position-based mean error) 与每个检查点的统计量"""
import math
from collections import deque
from typing import Iterator, Sequence

import numpy as np

from config import SwarmConfig
from models import RunSummary, StepRecord, SwarmDomainError


class PbMeWindow:
    """最近 t_ref 步的 (粒子位置, gbest 位置) 快照"""

    def __init__(self, t_ref: int = SwarmConfig.T_REF):
        if t_ref < 1:
            raise SwarmDomainError(f"t_ref 至少为 1: {t_ref}")
        self.t_ref = t_ref
        self._buffer = deque(maxlen=t_ref)

    def push(self, record: StepRecord):
        self._buffer.append(record)

    def __len__(self) -> int:
        return len(self._buffer)

    def __iter__(self) -> Iterator[StepRecord]:
        return iter(self._buffer)


def _widths(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    width = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    if np.any(width == 0):
        raise SwarmDomainError("可行区间退化: 存在 x_jmax = x_jmin")
    return width


def step_clustering(positions: np.ndarray, gbest: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    """单步的归一化均方根距离"""
    width = _widths(lower, upper)
    m, n = positions.shape
    return math.sqrt(float(np.sum(((positions - gbest) / width) ** 2)) / (m * n))


def pb_me(window: PbMeWindow, lower: np.ndarray, upper: np.ndarray) -> float:
    """窗口内各步 step_clustering 的平均; 不足 t_ref 步时按实际步数平均"""
    if len(window) == 0:
        raise SwarmDomainError("pb_me 窗口为空")
    terms = [step_clustering(r.positions, r.gbest_position, lower, upper) for r in window]
    return math.fsum(terms) / len(terms)


def summarize(errors: Sequence[float], pb_mes: Sequence[float],
              threshold: float = SwarmConfig.SUCCESS_THRESHOLD,
              report_success: bool = True) -> RunSummary:
    """BEST / MEDIAN / MEAN / WORST / MEAN PB_ME / 成功率"""
    errors = np.asarray(errors, dtype=float)
    pb_mes = np.asarray(pb_mes, dtype=float)
    if errors.size == 0:
        raise SwarmDomainError("summarize 需要至少一次运行")
    if pb_mes.size != errors.size:
        raise SwarmDomainError(f"误差 ({errors.size}) 与 pb_me ({pb_mes.size}) 数量不一致")

    success = None
    if report_success:
        success = 100.0 * int(np.count_nonzero(errors <= threshold)) / errors.size
    return RunSummary(
        best=float(errors.min()),
        median=float(np.median(errors)),
        mean=math.fsum(errors) / errors.size,
        worst=float(errors.max()),
        mean_pb_me=math.fsum(pb_mes) / pb_mes.size,
        success_rate=success,
    )


def trap_rate(errors: Sequence[float], level: float, tol: float) -> float:
    """最终误差落在局部最优值 level 附近 (±tol) 的运行所占百分比"""
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise SwarmDomainError("trap_rate 需要至少一次运行")
    return 100.0 * int(np.count_nonzero(np.abs(errors - level) <= tol)) / errors.size
