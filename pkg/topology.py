"""邻域拓扑: global, ring, 动态 ring, wheel, random

邻域总是包含粒子本身; 下标是固定的粒子编号, 与空间位置无关。
"""
import logging
import math
from dataclasses import replace
from typing import FrozenSet

import numpy as np

from models import ConfigError, SwarmDomainError, SwarmState, Topology, TopologyKind

logger = logging.getLogger(__name__)

NeighbourSet = FrozenSet[int]

_LABELS = {
    TopologyKind.GLOBAL: "GLOBAL",
    TopologyKind.DYNAMIC_RING: "RING DYNAMIC",
    TopologyKind.WHEEL: "WHEEL",
    TopologyKind.RANDOM: "RANDOM",
}


def validate_topology(topo: Topology, m: int) -> Topology:
    """检查拓扑在群规模 m 下是否合法, 并把 nnf='m-1' 落实为整数"""
    if m < 3:
        raise SwarmDomainError(f"群规模至少为 3: m={m}")

    if topo.kind is TopologyKind.RING:
        if topo.nn % 2 or not 2 <= topo.nn <= m - 1:
            raise SwarmDomainError(f"ring 的 nn 必须为偶数且 2 <= nn <= {m - 1}: nn={topo.nn}")
    elif topo.kind is TopologyKind.DYNAMIC_RING:
        nnf = m - 1 if topo.nnf is None else topo.nnf
        if not 1 <= topo.nni <= nnf <= m - 1:
            raise SwarmDomainError(f"动态 ring 需满足 1 <= nni <= nnf <= {m - 1}: nni={topo.nni}, nnf={nnf}")
        return replace(topo, nnf=nnf)
    elif topo.kind is TopologyKind.WHEEL:
        if not 0 <= topo.hub < m:
            raise SwarmDomainError(f"wheel 的 hub 必须在 [0, {m}) 内: hub={topo.hub}")
    return topo


def dynamic_degree(nni: int, nnf: int, t: int, T: int) -> int:
    """邻居数从 nni 线性增长到 nnf (四舍五入到整数)"""
    if T <= 1:
        return nni
    return int(math.floor(nni + (nnf - nni) * t / (T - 1) + 0.5))


def ring_offsets(nn: int) -> np.ndarray:
    """nn 为奇数时后继多一个: ceil(nn/2) 个后继, floor(nn/2) 个前驱"""
    return np.arange(-(nn // 2), (nn + 1) // 2 + 1)


def _ring_degree(topo: Topology, t: int, T: int) -> int:
    if topo.kind is TopologyKind.DYNAMIC_RING:
        return dynamic_degree(topo.nni, topo.nnf, t, T)
    return topo.nn


def neighbours(topo: Topology, i: int, t: int, T: int, m: int, rng: np.random.Generator) -> NeighbourSet:
    topo = validate_topology(topo, m)
    if not 0 <= i < m:
        raise SwarmDomainError(f"粒子下标越界: i={i}, m={m}")
    if not 0 <= t < max(T, 1):
        raise SwarmDomainError(f"时间步越界: t={t}, T={T}")

    if topo.kind is TopologyKind.GLOBAL:
        return frozenset(range(m))

    if topo.kind in (TopologyKind.RING, TopologyKind.DYNAMIC_RING):
        return frozenset(int((i + o) % m) for o in ring_offsets(_ring_degree(topo, t, T)))

    if topo.kind is TopologyKind.WHEEL:
        return frozenset(range(m)) if i == topo.hub else frozenset((topo.hub, i))

    # random: 每个粒子每一步重新抽取 k ~ U{1..m-1} 个不同的其他粒子
    k = int(rng.integers(1, m))
    others = np.delete(np.arange(m), i)
    chosen = rng.choice(others, size=k, replace=False)
    return frozenset([i, *chosen.tolist()])


def lbest_index(swarm: SwarmState, ns: NeighbourSet) -> int:
    """邻域内 pbest 最优者; 相同时取最小下标"""
    return _best_member(swarm.pbest_conflicts, ns)


def _best_member(conflicts: np.ndarray, members) -> int:
    return min(members, key=lambda j: (conflicts[j], j))


def lbest_indices(topo: Topology, pbest_conflicts: np.ndarray, t: int, T: int,
                  rng: np.random.Generator) -> np.ndarray:
    """全群的 lbest 下标; topo 需已通过 validate_topology"""
    m = pbest_conflicts.shape[0]
    idx = np.arange(m)

    if topo.kind is TopologyKind.GLOBAL:
        return np.full(m, int(np.argmin(pbest_conflicts)))

    if topo.kind in (TopologyKind.RING, TopologyKind.DYNAMIC_RING):
        members = (idx[None, :] + ring_offsets(_ring_degree(topo, t, T))[:, None]) % m
        values = pbest_conflicts[members]
        best = values.min(axis=0)
        return np.where(values == best, members, m).min(axis=0)

    if topo.kind is TopologyKind.WHEEL:
        hub_value = pbest_conflicts[topo.hub]
        result = np.where(pbest_conflicts < hub_value, idx, topo.hub)
        result = np.where(pbest_conflicts == hub_value, np.minimum(idx, topo.hub), result)
        result[topo.hub] = int(np.argmin(pbest_conflicts))
        return result

    return np.array([_best_member(pbest_conflicts, neighbours(topo, i, t, T, m, rng)) for i in range(m)])


def _parse_int(key: str, value: str, text: str) -> int:
    try:
        return int(value)
    except ValueError as e:
        raise ConfigError(f"拓扑参数 {key} 不是整数: {text!r}") from e


def parse_topology(text: str) -> Topology:
    """解析 'global', 'ring:nn=2', 'ring-dynamic:nni=2,nnf=m-1', 'wheel[:hub=0]', 'random'"""
    name, _, body = text.strip().lower().partition(":")
    try:
        kind = TopologyKind(name)
    except ValueError as e:
        raise ConfigError(f"未知的拓扑: {text!r}") from e

    params = {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"拓扑参数格式应为 key=value: {text!r}")
        params[key.strip()] = value.strip()

    allowed = {
        TopologyKind.GLOBAL: set(),
        TopologyKind.RING: {"nn"},
        TopologyKind.DYNAMIC_RING: {"nni", "nnf"},
        TopologyKind.WHEEL: {"hub"},
        TopologyKind.RANDOM: set(),
    }[kind]
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"拓扑 {name} 不接受参数 {sorted(unknown)}")

    fields = {}
    for key, value in params.items():
        if key == "nnf" and value.replace(" ", "") == "m-1":
            fields["nnf"] = None
        else:
            fields[key] = _parse_int(key, value, text)
    topo = Topology(kind=kind, **fields)
    logger.debug("拓扑 %r -> %s", text, topo)
    return topo


def topology_label(topo: Topology) -> str:
    if topo.kind is TopologyKind.RING:
        return f"RING nn={topo.nn}"
    if topo.kind is TopologyKind.DYNAMIC_RING and (topo.nni != 2 or topo.nnf is not None):
        nnf = "m-1" if topo.nnf is None else topo.nnf
        return f"RING DYNAMIC nni={topo.nni},nnf={nnf}"
    if topo.kind is TopologyKind.WHEEL and topo.hub != 0:
        return f"WHEEL hub={topo.hub}"
    return _LABELS[topo.kind]
