"""统计表与收敛曲线的文本形式 (pandas)"""
import io
from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple

import pandas as pd

from harness import ExperimentReport
from models import SwarmDomainError

TABLE_COLUMNS = [
    "PROBLEM", "DIMS", "SCHEME", "TOPOLOGY", "TIME_STEPS",
    "BEST", "MEDIAN", "MEAN", "WORST", "MEAN_PB_ME", "SUCCESS",
]
NUMERIC_COLUMNS = ["BEST", "MEDIAN", "MEAN", "WORST", "MEAN_PB_ME", "SUCCESS"]


def format_value(value: float) -> str:
    """三位有效数字的科学计数法, 如 3.21E-08"""
    return f"{value:.2E}"


def format_success(rate) -> str:
    return "-" if rate is None else f"{rate:.0f}"


def _ordered(reports: Sequence[ExperimentReport]) -> List[ExperimentReport]:
    """先按系数方案, 再按拓扑分组, 组的顺序按首次出现"""
    schemes = list(OrderedDict.fromkeys(r.config.scheme_label for r in reports))
    topologies = list(OrderedDict.fromkeys(r.config.topology_label for r in reports))
    return sorted(reports, key=lambda r: (schemes.index(r.config.scheme_label),
                                          topologies.index(r.config.topology_label)))


def table_frame(reports: Sequence[ExperimentReport]) -> pd.DataFrame:
    if not reports:
        raise SwarmDomainError("没有可渲染的报告")
    rows = []
    for report in _ordered(reports):
        cfg = report.config
        for c in report.checkpoints:
            s = report.summaries[c]
            rows.append([
                cfg.problem, cfg.dims, cfg.scheme_label, cfg.topology_label, c,
                format_value(s.best), format_value(s.median), format_value(s.mean),
                format_value(s.worst), format_value(s.mean_pb_me), format_success(s.success_rate),
            ])
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def render_table(reports: Sequence[ExperimentReport]) -> str:
    return table_frame(reports).to_csv(index=False, lineterminator="\n")


def parse_table(text: str) -> pd.DataFrame:
    """读回 render_table 的输出; SUCCESS 的 '-' 变为 NaN"""
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    for column in NUMERIC_COLUMNS:
        frame[column] = pd.to_numeric(frame[column], errors="coerce")
    frame["DIMS"] = frame["DIMS"].astype(int)
    frame["TIME_STEPS"] = frame["TIME_STEPS"].astype(int)
    return frame


def curves_frame(reports: Sequence[ExperimentReport]) -> pd.DataFrame:
    """每个实验一列, 每个时间步一行, 值为平均最优 conflict"""
    if not reports:
        raise SwarmDomainError("没有可导出的收敛曲线")
    columns = {}
    for report in reports:
        name = report.label
        k = 2
        while name in columns:
            name = f"{report.label} #{k}"
            k += 1
        columns[name] = pd.Series(report.curve, index=report.steps_index)
    frame = pd.concat(columns, axis=1)
    frame.index.name = "step"
    return frame


def group_reports(reports: Sequence[ExperimentReport]) -> Dict[Tuple[str, int], List[ExperimentReport]]:
    """按 (测试函数, 维数) 分组, 每组对应一张统计表"""
    groups: Dict[Tuple[str, int], List[ExperimentReport]] = OrderedDict()
    for report in reports:
        groups.setdefault((report.config.problem, report.config.dims), []).append(report)
    return groups
