import logging
from typing import Callable, Dict, Sequence, Union

import numpy as np

from models import BenchmarkProblem, ConfigError, ProblemName, SwarmDomainError

logger = logging.getLogger(__name__)


# 以下函数都沿最后一维求值, 既可传单个向量也可传 (k, n) 矩阵

def sphere(x: np.ndarray) -> np.ndarray:
    return np.sum(x ** 2, axis=-1)


def rosenbrock(x: np.ndarray) -> np.ndarray:
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head ** 2) ** 2 + (1.0 - head) ** 2, axis=-1)


def rastrigin(x: np.ndarray) -> np.ndarray:
    # 10n + sum(x^2 - 10 cos 2πx), 按项写成非负形式
    return np.sum(x ** 2 + 10.0 * (1.0 - np.cos(2.0 * np.pi * x)), axis=-1)


def griewank(x: np.ndarray) -> np.ndarray:
    j = np.arange(1, x.shape[-1] + 1)
    return 1.0 + np.sum(x ** 2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(j)), axis=-1)


def schaffer_f6(x: np.ndarray) -> np.ndarray:
    """径向推广: r^2 = sum(x_j^2)"""
    r2 = np.sum(x ** 2, axis=-1)
    return 0.5 + (np.sin(np.sqrt(r2)) ** 2 - 0.5) / (1.0 + 0.001 * r2) ** 2


CONFLICT_FUNCTIONS: Dict[ProblemName, Callable[[np.ndarray], np.ndarray]] = {
    ProblemName.SPHERE: sphere,
    ProblemName.ROSENBROCK: rosenbrock,
    ProblemName.RASTRIGIN: rastrigin,
    ProblemName.GRIEWANK: griewank,
    ProblemName.SCHAFFER_F6: schaffer_f6,
}

# 常用可行区间 (每个坐标相同)
DEFAULT_BOUNDS = {
    ProblemName.SPHERE: (-100.0, 100.0),
    ProblemName.ROSENBROCK: (-30.0, 30.0),
    ProblemName.RASTRIGIN: (-5.12, 5.12),
    ProblemName.GRIEWANK: (-600.0, 600.0),
    ProblemName.SCHAFFER_F6: (-100.0, 100.0),
}

Bound = Union[float, Sequence[float], None]


def _expand(bound: Bound, default: float, n: int) -> np.ndarray:
    if bound is None:
        return np.full(n, default)
    arr = np.asarray(bound, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise SwarmDomainError(f"边界长度 {arr.shape} 与维数 {n} 不符")
    return arr.copy()


def make_problem(name: Union[str, ProblemName], dims: int,
                 lower: Bound = None, upper: Bound = None) -> BenchmarkProblem:
    """按名称构造测试问题, 可覆盖默认可行区间"""
    try:
        problem_name = ProblemName(name)
    except ValueError as e:
        raise ConfigError(f"未知的测试函数: {name!r}") from e
    if dims < 1:
        raise SwarmDomainError(f"维数必须为正: {dims}")
    if problem_name is ProblemName.ROSENBROCK and dims < 2:
        raise SwarmDomainError("Rosenbrock 至少需要 2 维")

    lo, hi = DEFAULT_BOUNDS[problem_name]
    lower_arr = _expand(lower, lo, dims)
    upper_arr = _expand(upper, hi, dims)
    if np.any(lower_arr >= upper_arr):
        raise SwarmDomainError("每个坐标都必须满足 lower < upper")
    logger.debug("测试问题 %s %dD, 区间 [%s, %s]", problem_name.value, dims, lower_arr.min(), upper_arr.max())
    return BenchmarkProblem(name=problem_name, n=dims, lower=lower_arr, upper=upper_arr)


def conflict(p: BenchmarkProblem, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise SwarmDomainError(f"{p.name.value} 需要长度为 {p.n} 的向量, 实际形状 {x.shape}")
    return float(CONFLICT_FUNCTIONS[p.name](x))


def conflict_batch(p: BenchmarkProblem, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != p.n:
        raise SwarmDomainError(f"{p.name.value} 需要 (k, {p.n}) 矩阵, 实际形状 {X.shape}")
    return CONFLICT_FUNCTIONS[p.name](X)


def is_feasible(p: BenchmarkProblem, X: np.ndarray) -> np.ndarray:
    return np.all((X >= p.lower) & (X <= p.upper), axis=-1)


def evaluate_feasible(p: BenchmarkProblem, X: np.ndarray) -> np.ndarray:
    """只评估可行的行; 不可行的粒子不评估, 记为 +inf"""
    feasible = is_feasible(p, X)
    values = np.full(X.shape[0], np.inf)
    if feasible.any():
        values[feasible] = conflict_batch(p, X[feasible])
    return values


def error_of(p: BenchmarkProblem, conflict_value: float) -> float:
    return conflict_value - p.optimum_conflict
