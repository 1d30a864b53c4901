"""系数方案 -> 统一形式 (w, phi_min, phi_max, ip, sp)

所有方案都被解析成同一组参数, 更新公式只认这一种形式:
    phi_i ~ U(ip * phi_min, ip * phi_max)
    phi_s ~ U(sp * phi_min, sp * phi_max)
抽样按 lo + (hi - lo) * U 计算; 经典方案的区间直接取 [0, iw] 与 [0, sw]。
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from models import (
    Classical,
    CoefficientScheme,
    ConfigError,
    ConstrictedTypeI,
    RRR1,
    RRR2,
    ResolvedCoefficients,
    SchemeSpec,
    SwarmDomainError,
)

logger = logging.getLogger(__name__)

# RRR2 的 aw 上界: (3 + sqrt(5)) / 2
RRR2_AW_MAX = (3.0 + math.sqrt(5.0)) / 2.0

# 预设方案
C_PSO_1 = ConstrictedTypeI(aw=4.10, kappa=0.99994, ip=0.50)
PSO_RRR1_1 = RRR1(aw=1.80, ip=0.50)
PSO_RRR2_1 = RRR2(aw=2.40, ip=0.50)
CLASSICAL_DEFAULT = Classical(iw=1.49618, sw=1.49618, w=0.7298)

PRESETS: Dict[str, SchemeSpec] = {
    "c-pso-1": SchemeSpec("C-PSO-1", (C_PSO_1,)),
    "pso-rrr1-1": SchemeSpec("PSO-RRR1-1", (PSO_RRR1_1,)),
    "pso-rrr2-1": SchemeSpec("PSO-RRR2-1", (PSO_RRR2_1,)),
    "classical": SchemeSpec("CLASSICAL", (CLASSICAL_DEFAULT,)),
    "multi-swarm": SchemeSpec("MS", (PSO_RRR2_1, PSO_RRR1_1, C_PSO_1)),
}


def _check_ip(ip: float):
    if not 0.0 <= ip < 1.0:
        raise SwarmDomainError(f"ip 必须在 [0,1) 内: {ip}")


def constriction_factor(aw: float, kappa: float) -> float:
    """Type I'' 收缩因子 chi"""
    if aw >= 4.0:
        return 2.0 * kappa / (aw - 2.0 + math.sqrt(aw * aw - 4.0 * aw))
    return kappa


def resolve(scheme: CoefficientScheme) -> ResolvedCoefficients:
    """把任意方案解析成统一的系数形式"""
    if isinstance(scheme, Classical):
        if scheme.iw < 0 or scheme.sw < 0:
            raise SwarmDomainError(f"iw 与 sw 不能为负: {scheme}")
        total = scheme.iw + scheme.sw
        if total <= 0:
            raise SwarmDomainError("iw = sw = 0 时 ip 无定义")
        return ResolvedCoefficients(
            w=scheme.w,
            phi_min=0.0,
            phi_max=total,
            ip=scheme.iw / total,
            phi_i_range=(0.0, scheme.iw),
            phi_s_range=(0.0, scheme.sw),
        )

    if isinstance(scheme, ConstrictedTypeI):
        if not 0.0 < scheme.kappa < 1.0:
            raise SwarmDomainError(f"kappa 必须在 (0,1) 内: {scheme.kappa}")
        if scheme.aw <= 0:
            raise SwarmDomainError(f"aw 必须为正: {scheme.aw}")
        _check_ip(scheme.ip)
        if scheme.aw < 4.0:
            warnings.warn(
                f"aw = {scheme.aw} < 4, chi 取 kappa (建议 aw 略大于 4)",
                RuntimeWarning,
                stacklevel=2,
            )
        chi = constriction_factor(scheme.aw, scheme.kappa)
        return ResolvedCoefficients(w=chi, phi_min=0.0, phi_max=chi * scheme.aw, ip=scheme.ip)

    if isinstance(scheme, RRR1):
        if not 1.0 < scheme.aw < 2.0:
            raise SwarmDomainError(f"RRR1 的 aw 必须在 (1.00, 2.00) 内: {scheme.aw}")
        _check_ip(scheme.ip)
        w = scheme.aw - 1.0
        return ResolvedCoefficients(w=w, phi_min=0.5 * (w + 1.0), phi_max=1.5 * (w + 1.0), ip=scheme.ip)

    if isinstance(scheme, RRR2):
        if not 1.0 < scheme.aw < RRR2_AW_MAX:
            raise SwarmDomainError(f"RRR2 的 aw 必须在 (1.000, 2.618) 内: {scheme.aw}")
        _check_ip(scheme.ip)
        w = 1.0 / scheme.aw - 2.0 + scheme.aw
        phi_max = 2.0 * (w + 1.0)
        return ResolvedCoefficients(w=w, phi_min=2.0 * scheme.aw - phi_max, phi_max=phi_max, ip=scheme.ip)

    raise SwarmDomainError(f"未知的系数方案: {scheme!r}")


def sample_phi(rc: ResolvedCoefficients, rng: np.random.Generator) -> Tuple[float, float]:
    """为一个分量抽取 (phi_i, phi_s), 先 phi_i 后 phi_s"""
    (i_lo, i_hi), (s_lo, s_hi) = rc.phi_i_range, rc.phi_s_range
    phi_i = i_lo + (i_hi - i_lo) * rng.random()
    phi_s = s_lo + (s_hi - s_lo) * rng.random()
    return phi_i, phi_s


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """每个粒子一行的系数列向量, 形状均为 (m, 1)"""
    w: np.ndarray
    i_lo: np.ndarray
    i_hi: np.ndarray
    s_lo: np.ndarray
    s_hi: np.ndarray

    @property
    def m(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_resolved(cls, per_particle: Sequence[ResolvedCoefficients]) -> "CoefficientTable":
        def column(values):
            return np.array(values, dtype=float).reshape(-1, 1)

        return cls(
            w=column([rc.w for rc in per_particle]),
            i_lo=column([rc.phi_i_range[0] for rc in per_particle]),
            i_hi=column([rc.phi_i_range[1] for rc in per_particle]),
            s_lo=column([rc.phi_s_range[0] for rc in per_particle]),
            s_hi=column([rc.phi_s_range[1] for rc in per_particle]),
        )


def sample_phi_matrix(table: CoefficientTable, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """整群抽样; 消耗顺序和每个元素的算术都与逐粒子逐分量调用 sample_phi 一致"""
    u = rng.random((table.m, n, 2))
    phi_i = table.i_lo + (table.i_hi - table.i_lo) * u[:, :, 0]
    phi_s = table.s_lo + (table.s_hi - table.s_lo) * u[:, :, 1]
    return phi_i, phi_s


def _parse_params(body: str, text: str) -> Dict[str, float]:
    params = {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"方案参数格式应为 key=value: {text!r}")
        try:
            params[key.strip().lower()] = float(value)
        except ValueError as e:
            raise ConfigError(f"方案参数不是数字: {item!r}") from e
    return params


_PARAMETRIC = {
    "classical": (Classical, ("iw", "sw", "w")),
    "constricted": (ConstrictedTypeI, ("aw", "kappa", "ip")),
    "rrr1": (RRR1, ("aw", "ip")),
    "rrr2": (RRR2, ("aw", "ip")),
}


def parse_scheme(text: str) -> SchemeSpec:
    """解析方案配置字符串, 如 'c-pso-1' 或 'rrr1:aw=1.5,ip=0.5'"""
    key = text.strip().lower()
    if key in PRESETS:
        return PRESETS[key]

    name, _, body = key.partition(":")
    if name not in _PARAMETRIC or not body:
        raise ConfigError(f"未知的系数方案: {text!r}")
    cls, fields = _PARAMETRIC[name]
    params = _parse_params(body, text)
    missing = [f for f in fields if f not in params]
    extra = [k for k in params if k not in fields]
    if missing or extra:
        raise ConfigError(f"方案 {name} 需要参数 {fields}, 缺少 {missing}, 多余 {extra}")
    scheme = cls(**{f: params[f] for f in fields})
    rc = resolve(scheme)  # 尽早报告取值范围错误
    label = name.upper() + "(" + ",".join(f"{f}={params[f]:g}" for f in fields) + ")"
    logger.debug("方案 %s -> %s", label, rc)
    return SchemeSpec(label, (scheme,))