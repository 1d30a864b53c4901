import numpy as np
import pytest

from benchmarks import evaluate_feasible, make_problem
from coefficients import PRESETS, CoefficientTable, parse_scheme, resolve
from initialization import InitConfig, init_swarm
from models import Classical, ResolvedCoefficients, SchemeSpec, SwarmDomainError, SwarmState, Topology, TopologyKind
from swarm_engine import coefficient_table, default_checkpoints, multi_swarm_assign, run, step

GLOBAL = Topology(TopologyKind.GLOBAL)
RING2 = Topology(TopologyKind.RING, nn=2)


def classical_oracle(state: SwarmState, problem, iw, sw, w, steps, rng):
    """逐粒子逐分量按经典公式 v = w v + iw U1 (p - x) + sw U2 (g - x) 迭代"""
    x = state.positions.copy()
    v = state.velocities.copy()
    p = state.pbest_positions.copy()
    pc = state.pbest_conflicts.copy()
    m, n = x.shape
    for _ in range(steps):
        g = p[int(np.argmin(pc))].copy()
        for i in range(m):
            for j in range(n):
                u1 = rng.random()
                u2 = rng.random()
                v[i, j] = w * v[i, j] + iw * u1 * (p[i, j] - x[i, j]) + sw * u2 * (g[j] - x[i, j])
                x[i, j] = x[i, j] + v[i, j]
        c = evaluate_feasible(problem, x)
        better = c < pc
        p[better] = x[better]
        pc[better] = c[better]
    return x, v, p, pc


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("iw, sw, w", [(1.49618, 1.49618, 0.7298), (1.2, 1.7, 0.7), (2.05, 0.3, 0.6)])
def test_classical_and_unified_forms_give_identical_trajectories(seed, iw, sw, w):
    problem = make_problem("rastrigin", 3)
    scheme = Classical(iw=iw, sw=sw, w=w)
    table = CoefficientTable.from_resolved([resolve(scheme)] * 10)
    cfg = InitConfig.for_problem(10, problem, lhs_candidates=3)

    engine_rng = np.random.default_rng(seed)
    state = init_swarm(cfg, problem, engine_rng)
    oracle_rng = np.random.default_rng(seed)
    start = init_swarm(cfg, problem, oracle_rng)

    for _ in range(100):
        state = step(state, GLOBAL, problem, table, 100, engine_rng)
    x, v, p, pc = classical_oracle(start, problem, iw, sw, w, 100, oracle_rng)

    assert np.array_equal(state.positions, x)
    assert np.array_equal(state.velocities, v)
    assert np.array_equal(state.pbest_positions, p)
    assert np.array_equal(state.pbest_conflicts, pc)


def _fixed_state(positions, velocities, pbest, pbest_conflicts):
    pbest_conflicts = np.asarray(pbest_conflicts, dtype=float)
    gbest = int(np.argmin(pbest_conflicts))
    return SwarmState(
        t=0,
        positions=np.asarray(positions, dtype=float),
        velocities=np.asarray(velocities, dtype=float),
        pbest_positions=np.asarray(pbest, dtype=float),
        pbest_conflicts=pbest_conflicts,
        scheme_tags=np.zeros(len(pbest_conflicts), dtype=int),
        gbest_index=gbest,
        gbest_conflict=float(pbest_conflicts[gbest]),
    )


def test_step_feasibility_and_strict_improvement(sphere2, rng):
    # phi 恒为 0, 于是 x' = x + v
    still = CoefficientTable.from_resolved([ResolvedCoefficients(w=1.0, phi_min=0.0, phi_max=0.0, ip=0.5)] * 3)
    state = _fixed_state(
        positions=[[99.0, 0.0], [10.0, 0.0], [3.0, 4.0]],
        velocities=[[10.0, 0.0], [-9.0, 0.0], [-6.0, 0.0]],
        pbest=[[50.0, 50.0], [10.0, 0.0], [3.0, 4.0]],
        pbest_conflicts=[5000.0, 100.0, 25.0],
    )
    before = state.positions.copy()

    nxt = step(state, RING2, sphere2, still, 10, rng)

    assert nxt.t == 1
    assert nxt.positions.tolist() == [[109.0, 0.0], [1.0, 0.0], [-3.0, 4.0]]
    # 越界: 不评估, pbest 不变, 但照常运动
    assert nxt.pbest_positions[0].tolist() == [50.0, 50.0]
    assert nxt.pbest_conflicts[0] == 5000.0
    # 严格更优才更新
    assert nxt.pbest_positions[1].tolist() == [1.0, 0.0]
    assert nxt.pbest_positions[2].tolist() == [3.0, 4.0]
    assert nxt.gbest_index == 1
    assert nxt.gbest_conflict == 1.0
    # 输入状态不被修改
    assert np.array_equal(state.positions, before)
    assert state.t == 0


def test_step_past_horizon_raises(sphere2, rng):
    cfg = InitConfig.for_problem(5, sphere2, lhs_candidates=2)
    state = init_swarm(cfg, sphere2, rng)
    table = coefficient_table(PRESETS["c-pso-1"], state.scheme_tags)
    state = step(state, GLOBAL, sphere2, table, 1, rng)
    with pytest.raises(SwarmDomainError):
        step(state, GLOBAL, sphere2, table, 1, rng)


def test_default_checkpoints():
    assert default_checkpoints(10000) == [1000, 10000]
    assert default_checkpoints(1000) == [1000]
    assert default_checkpoints(500) == [500]
    assert default_checkpoints(0) == [0]


def test_multi_swarm_blocks():
    tags = multi_swarm_assign(50)
    assert np.bincount(tags).tolist() == [17, 17, 16]
    assert np.all(np.diff(tags) >= 0)
    assert np.bincount(multi_swarm_assign(3)).tolist() == [1, 1, 1]
    with pytest.raises(SwarmDomainError):
        multi_swarm_assign(2)


def test_multi_swarm_coefficient_table():
    ms = PRESETS["multi-swarm"]
    table = coefficient_table(ms, multi_swarm_assign(50))
    expected = [resolve(s).w for s in ms.schemes]
    assert table.w[:17, 0].tolist() == [expected[0]] * 17
    assert table.w[17:34, 0].tolist() == [expected[1]] * 17
    assert table.w[34:, 0].tolist() == [expected[2]] * 16


def test_run_records(sphere2):
    record = run(sphere2, RING2, parse_scheme("pso-rrr1-1"), 10, 40, np.random.default_rng(0),
                 lhs_candidates=3, t_ref=5, checkpoints=[10, 40])
    assert record.errors.shape == (41,)
    assert np.all(np.diff(record.errors) <= 0)
    assert sorted(record.checkpoint_errors) == [10, 40]
    assert record.checkpoint_errors[40] == record.final_error
    assert record.final_state.t == 40
    assert np.array_equal(record.final_gbest_position, record.final_state.pbest_positions[record.final_state.gbest_index])
    assert all(v >= 0 for v in record.checkpoint_pb_me.values())


def test_run_with_zero_steps_reports_initialization(sphere2):
    record = run(sphere2, GLOBAL, parse_scheme("c-pso-1"), 10, 0, np.random.default_rng(0), lhs_candidates=3)
    assert record.errors.shape == (1,)
    assert list(record.checkpoint_errors) == [0]
    assert record.final_state.t == 0


def test_run_rejects_bad_checkpoints(sphere2, rng):
    with pytest.raises(SwarmDomainError):
        run(sphere2, GLOBAL, parse_scheme("c-pso-1"), 10, 5, rng, lhs_candidates=2, checkpoints=[6])
    with pytest.raises(SwarmDomainError):
        run(sphere2, Topology(TopologyKind.RING, nn=3), parse_scheme("c-pso-1"), 10, 5, rng, lhs_candidates=2)


@pytest.mark.parametrize("topology", [GLOBAL, RING2, Topology(TopologyKind.RANDOM),
                                      Topology(TopologyKind.DYNAMIC_RING), Topology(TopologyKind.WHEEL)])
def test_run_is_reproducible(sphere2, topology):
    ms = PRESETS["multi-swarm"]
    a = run(sphere2, topology, ms, 9, 25, np.random.default_rng(42), lhs_candidates=2)
    b = run(sphere2, topology, ms, 9, 25, np.random.default_rng(42), lhs_candidates=2)
    assert np.array_equal(a.errors, b.errors)
    assert np.array_equal(a.final_state.positions, b.final_state.positions)


def test_constricted_swarm_solves_2d_sphere(sphere2):
    record = run(sphere2, GLOBAL, parse_scheme("c-pso-1"), 20, 1000, np.random.default_rng(1), lhs_candidates=5)
    assert record.final_error < 1e-4


def test_custom_scheme_spec_runs(sphere2):
    spec = SchemeSpec("custom", (Classical(iw=1.2, sw=1.2, w=0.6),))
    record = run(sphere2, GLOBAL, spec, 6, 5, np.random.default_rng(0), lhs_candidates=1)
    assert record.errors.shape == (6,)


def test_hand_computed_global_step(sphere2, rng):
    # phi_i = phi_s = 0.5, w = 0.5
    half = CoefficientTable.from_resolved([ResolvedCoefficients(w=0.5, phi_min=1.0, phi_max=1.0, ip=0.5)] * 3)
    x = [[0.0, 0.0], [2.0, 0.0], [0.0, 4.0]]
    state = _fixed_state(positions=x, velocities=[[1.0, 1.0], [0.0, 0.0], [0.0, -2.0]],
                         pbest=x, pbest_conflicts=[0.0, 4.0, 16.0])

    nxt = step(state, GLOBAL, sphere2, half, 5, rng)

    assert nxt.velocities.tolist() == [[0.5, 0.5], [-1.0, 0.0], [0.0, -3.0]]
    assert nxt.positions.tolist() == [[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]]
    assert nxt.pbest_conflicts.tolist() == [0.0, 1.0, 1.0]
    assert nxt.gbest_index == 0


@pytest.mark.parametrize("topology", [GLOBAL, RING2, Topology(TopologyKind.RANDOM), Topology(TopologyKind.WHEEL)])
def test_stationary_swarm_is_a_fixed_point(sphere2, rng, topology):
    x = np.tile([1.0, -2.0], (4, 1))
    state = _fixed_state(positions=x, velocities=np.zeros((4, 2)), pbest=x, pbest_conflicts=[5.0] * 4)
    table = coefficient_table(PRESETS["multi-swarm"], multi_swarm_assign(4))
    nxt = step(state, topology, sphere2, table, 10, rng)
    assert np.array_equal(nxt.positions, x)
    assert not nxt.velocities.any()
    assert np.array_equal(nxt.pbest_positions, x)
