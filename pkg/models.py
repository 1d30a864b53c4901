from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np


class SwarmDomainError(ValueError):
    """参数或状态违反领域约束"""


class ConfigError(ValueError):
    """配置字符串或实验配置无法解析"""


# ---------------------------------------------------------------------------
# 系数方案
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classical:
    iw: float
    sw: float
    w: float


@dataclass(frozen=True)
class ConstrictedTypeI:
    aw: float
    kappa: float
    ip: float


@dataclass(frozen=True)
class RRR1:
    aw: float
    ip: float


@dataclass(frozen=True)
class RRR2:
    aw: float
    ip: float


CoefficientScheme = Union[Classical, ConstrictedTypeI, RRR1, RRR2]


@dataclass(frozen=True)
class SchemeSpec:
    label: str
    schemes: Tuple[CoefficientScheme, ...]

    @property
    def is_multi_swarm(self) -> bool:
        return len(self.schemes) > 1


@dataclass(frozen=True)
class ResolvedCoefficients:
    """统一形式的系数

    phi_i_range / phi_s_range 是 phi_i, phi_s 的实际抽样区间, 默认为
    ip * [phi_min, phi_max] 与 sp * [phi_min, phi_max]; 经典方案直接给出
    [0, iw] 和 [0, sw], 这样抽样结果与 iw * U 逐位相同。
    """
    w: float
    phi_min: float
    phi_max: float
    ip: float
    sp: float = field(init=False)
    phi_i_range: Optional[Tuple[float, float]] = None
    phi_s_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not 0.0 <= self.ip < 1.0:
            raise SwarmDomainError(f"ip 必须在 [0,1) 内: {self.ip}")
        if self.phi_min > self.phi_max:
            raise SwarmDomainError(f"phi_min ({self.phi_min}) 大于 phi_max ({self.phi_max})")
        sp = 1.0 - self.ip
        object.__setattr__(self, "sp", sp)
        if self.phi_i_range is None:
            object.__setattr__(self, "phi_i_range", (self.ip * self.phi_min, self.ip * self.phi_max))
        if self.phi_s_range is None:
            object.__setattr__(self, "phi_s_range", (sp * self.phi_min, sp * self.phi_max))


# ---------------------------------------------------------------------------
# 邻域拓扑
# ---------------------------------------------------------------------------

class TopologyKind(Enum):
    GLOBAL = "global"
    RING = "ring"
    DYNAMIC_RING = "ring-dynamic"
    WHEEL = "wheel"
    RANDOM = "random"


@dataclass(frozen=True)
class Topology:
    kind: TopologyKind
    nn: int = 2
    nni: int = 2
    nnf: Optional[int] = None  # None 表示 m-1
    hub: int = 0


# ---------------------------------------------------------------------------
# 测试函数
# ---------------------------------------------------------------------------

class ProblemName(Enum):
    SPHERE = "sphere"
    ROSENBROCK = "rosenbrock"
    RASTRIGIN = "rastrigin"
    GRIEWANK = "griewank"
    SCHAFFER_F6 = "schaffer-f6"


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    name: ProblemName
    n: int
    lower: np.ndarray
    upper: np.ndarray
    optimum_conflict: float = 0.0

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


# ---------------------------------------------------------------------------
# 粒子群状态与运行记录
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SwarmState:
    t: int
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_conflicts: np.ndarray
    scheme_tags: np.ndarray
    gbest_index: int
    gbest_conflict: float

    @property
    def m(self) -> int:
        return self.positions.shape[0]

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def gbest_position(self) -> np.ndarray:
        return self.pbest_positions[self.gbest_index]


@dataclass(frozen=True, eq=False)
class StepRecord:
    t: int
    gbest_conflict: float
    gbest_position: np.ndarray
    positions: np.ndarray


@dataclass(eq=False)
class RunRecord:
    errors: np.ndarray  # 长度 T+1, 下标 0 为初始化
    checkpoint_errors: Dict[int, float]
    checkpoint_pb_me: Dict[int, float]
    final_state: SwarmState

    @property
    def final_error(self) -> float:
        return float(self.errors[-1])

    @property
    def final_gbest_position(self) -> np.ndarray:
        return self.final_state.gbest_position


@dataclass(frozen=True)
class RunSummary:
    best: float
    median: float
    mean: float
    worst: float
    mean_pb_me: float
    success_rate: Optional[float]  # 中间检查点为 None

    def to_dict(self):
        return {
            'best': self.best,
            'median': self.median,
            'mean': self.mean,
            'worst': self.worst,
            'mean_pb_me': self.mean_pb_me,
            'success_rate': self.success_rate,
        }


@dataclass(frozen=True)
class ExperimentFailure:
    config: dict
    error: str
