import numpy as np
import pandas as pd
import pytest

from harness import ExperimentReport, make_config, run_experiment
from models import RunSummary, SwarmDomainError
from tables import TABLE_COLUMNS, curves_frame, format_success, format_value, group_reports, parse_table, render_table


def fake_report(scheme, topology, problem="sphere", dims=2, final=None):
    cfg = make_config(problem=problem, dims=dims, scheme=scheme, topology=topology)
    final = final or RunSummary(0.0, 3.2114e-08, 4.5e-05, 1.2e-03, 0.0456, 96.0)
    steps = np.array([0, 5000, 10000])
    return ExperimentReport(
        config=cfg,
        checkpoints=[1000, 10000],
        summaries={
            1000: RunSummary(1.5e-10, 2.25e-07, 3.0e-06, 9.99e-02, 0.5, None),
            10000: final,
        },
        steps_index=steps,
        error_histories=np.zeros((2, 3)),
        pb_me=np.zeros((2, 2)),
        curve=np.array([10.0, 1.0, 0.5]),
    )


def test_value_formatting():
    assert format_value(0.0) == "0.00E+00"
    assert format_value(3.2114e-08) == "3.21E-08"
    assert format_value(12345.0) == "1.23E+04"
    assert format_success(96.0) == "96"
    assert format_success(100.0) == "100"
    assert format_success(None) == "-"


def test_render_table_layout():
    text = render_table([fake_report("c-pso-1", "global")])
    lines = text.splitlines()
    assert lines[0] == ",".join(TABLE_COLUMNS)
    assert lines[1] == "sphere,2,C-PSO-1,GLOBAL,1000,1.50E-10,2.25E-07,3.00E-06,9.99E-02,5.00E-01,-"
    assert lines[2] == "sphere,2,C-PSO-1,GLOBAL,10000,0.00E+00,3.21E-08,4.50E-05,1.20E-03,4.56E-02,96"
    assert text.endswith("\n")


def test_rows_grouped_by_scheme_then_topology():
    reports = [
        fake_report("c-pso-1", "ring:nn=2"),
        fake_report("pso-rrr1-1", "global"),
        fake_report("c-pso-1", "global"),
        fake_report("pso-rrr1-1", "ring:nn=2"),
    ]
    frame = parse_table(render_table(reports))
    pairs = list(dict.fromkeys(zip(frame["SCHEME"], frame["TOPOLOGY"])))
    assert pairs == [
        ("C-PSO-1", "RING nn=2"),
        ("C-PSO-1", "GLOBAL"),
        ("PSO-RRR1-1", "RING nn=2"),
        ("PSO-RRR1-1", "GLOBAL"),
    ]
    assert frame["TIME_STEPS"].tolist() == [1000, 10000] * 4


def test_parse_round_trip_within_rounding():
    report = fake_report("multi-swarm", "ring-dynamic:nni=2,nnf=m-1")
    frame = parse_table(render_table([report]))
    final = frame.iloc[1]
    s = report.summaries[10000]
    for column, value in [("BEST", s.best), ("MEDIAN", s.median), ("MEAN", s.mean),
                          ("WORST", s.worst), ("MEAN_PB_ME", s.mean_pb_me)]:
        assert final[column] == pytest.approx(value, rel=5e-3, abs=0)
    assert final["SUCCESS"] == 96
    assert np.isnan(frame.iloc[0]["SUCCESS"])
    assert final["SCHEME"] == "MS"
    assert final["TOPOLOGY"] == "RING DYNAMIC"
    assert final["DIMS"] == 2


def test_real_report_round_trip(small_config):
    report = run_experiment(small_config(checkpoints=[10, 30]))
    frame = parse_table(render_table([report]))
    assert len(frame) == 2
    assert frame.iloc[1]["MEAN"] == pytest.approx(report.summaries[30].mean, rel=5e-3)


def test_curves_frame_has_one_column_per_experiment():
    reports = [fake_report("c-pso-1", "global"), fake_report("c-pso-1", "wheel"), fake_report("c-pso-1", "global")]
    frame = curves_frame(reports)
    assert isinstance(frame, pd.DataFrame)
    assert frame.shape == (3, 3)
    assert frame.index.name == "step"
    assert frame.index.tolist() == [0, 5000, 10000]
    assert list(frame.columns) == ["C-PSO-1 GLOBAL", "C-PSO-1 WHEEL", "C-PSO-1 GLOBAL #2"]
    assert frame["C-PSO-1 WHEEL"].tolist() == [10.0, 1.0, 0.5]


def test_group_reports_by_problem_and_dims():
    reports = [fake_report("c-pso-1", "global", dims=10), fake_report("c-pso-1", "global"),
               fake_report("c-pso-1", "wheel", dims=10)]
    groups = group_reports(reports)
    assert list(groups) == [("sphere", 10), ("sphere", 2)]
    assert len(groups[("sphere", 10)]) == 2


def test_empty_inputs_raise():
    with pytest.raises(SwarmDomainError):
        render_table([])
    with pytest.raises(SwarmDomainError):
        curves_frame([])
