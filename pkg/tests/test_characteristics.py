import numpy as np
import pytest

from psyslab import (ClassLabel, Direction, EllipticStart, Family,
                     PeriodicGrid, PressureLaw, SolverConfig, StateField,
                     Termination, WindowTooShort, classify, constant_state,
                     dual_growth_spotcheck, gradient_beta, invariant_drift,
                     predict_blowup, run, simple_wave_state, trace)
from psyslab.solver import RunStatus, Trajectory

QUAD = PressureLaw.quadratic()


def synthetic_trajectory(u_of_t, v_value, times, n=64):
    """Trajectory wrapper around a prescribed x-independent field; need
    not solve the system (curve-level checks only)."""
    g = PeriodicGrid(n)
    snaps = [(float(t), StateField(g, np.full(n, u_of_t(t)), np.full(n, v_value)))
             for t in times]
    return Trajectory(QUAD, snaps, RunStatus.completed, None, [], len(times))


def static_trajectory(u_samples, v_samples, times, n):
    g = PeriodicGrid(n)
    s = StateField(g, u_samples, v_samples)
    return Trajectory(QUAD, [(float(t), s) for t in times],
                      RunStatus.completed, None, [], len(times))


@pytest.fixture(scope="module")
def constant_traj():
    g = PeriodicGrid(256)
    return run(QUAD, constant_state(g, -1.0, 0.0), 0.0, SolverConfig(t_max=3.0))


def test_constant_state_family1_line(constant_traj):
    c = trace(constant_traj, 0.25, Family.first)
    last = c.samples[-1]
    assert c.termination is Termination.reached_horizon
    assert abs(last.t - 3.0) < 1e-9
    assert abs(last.x - 3.25) < 1e-9          # speed exactly 1, unwrapped
    assert abs(last.K_accum + 0.75) < 1e-8    # k = -1/4 along the curve
    assert all(abs(s.beta) < 1e-12 for s in c.samples)
    xs = [s.x for s in c.samples]
    assert np.all(np.diff(xs) > 0.0)          # family-1 lift non-decreasing


def test_constant_state_family2_line(constant_traj):
    c = trace(constant_traj, 0.25, Family.second)
    assert abs(c.samples[-1].x + 2.75) < 1e-9
    xs = [s.x for s in c.samples]
    assert np.all(np.diff(xs) < 0.0)


def test_constant_state_drift_zero(constant_traj):
    c = trace(constant_traj, 0.1, Family.first)
    assert invariant_drift(c) < 1e-12


def test_K_accum_non_increasing(constant_traj):
    c = trace(constant_traj, 0.6, Family.first)
    ks = [s.K_accum for s in c.samples]
    assert np.all(np.diff(ks) <= 0.0)


def test_predict_blowup_constant_curve(constant_traj):
    c = trace(constant_traj, 0.25, Family.first)
    # solve 1 + 2 * (-0.25) t = 0
    assert predict_blowup(c, 2.0) == pytest.approx(2.0, abs=1e-8)
    assert predict_blowup(c, 0.0) is None
    assert predict_blowup(c, -1.0) is None    # negative beta decays
    # closed form t0 + 1/(beta0 |k|) for roots inside the window [0, 3]
    for b0 in (1.5, 4.0, 10.0):
        assert predict_blowup(c, b0) == pytest.approx(4.0 / b0, abs=1e-8)
    assert predict_blowup(c, 0.5) is None     # root at t=8, beyond the window


def test_classify_constant_is_A(constant_traj):
    horizon = constant_traj.t_end
    c = trace(constant_traj, 0.25, Family.first)
    assert classify(c, horizon) is ClassLabel.A_plus
    cb = trace(constant_traj, 0.25, Family.first, Direction.backward)
    assert classify(cb, horizon) is ClassLabel.A_minus


def test_classify_undetermined_when_window_short(constant_traj):
    c = trace(constant_traj, 0.25, Family.first)
    assert classify(c, horizon=50.0) is ClassLabel.undetermined


def test_backward_trace_starts_at_window_end(constant_traj):
    c = trace(constant_traj, 0.5, Family.first, Direction.backward)
    assert c.samples[0].t == pytest.approx(3.0, abs=1e-9)
    ts = [s.t for s in c.samples]
    assert np.all(np.diff(ts) < 0.0)
    assert abs(c.samples[-1].t) < 1e-9


def test_boundary_hit_in_mixed_field():
    # static mixed-type field: u crosses 0; the curve slides toward the
    # interface with speed ~ sqrt(-u) and reaches it in finite time
    g = PeriodicGrid(256)
    u = -0.5 + 0.8 * np.sin(2 * np.pi * g.nodes)
    traj = static_trajectory(u, np.zeros(256), np.arange(0, 41) * 0.25, 256)
    c = trace(traj, 0.75, Family.first)
    assert c.termination is Termination.reached_boundary
    assert c.t_hit is not None
    assert c.samples[-1].u > -1e-3
    assert all(s.u < 0.0 for s in c.samples[:-1])
    assert classify(c, horizon=10.0) is ClassLabel.A_plus


def test_elliptic_start_raises():
    g = PeriodicGrid(256)
    u = -0.5 + 0.8 * np.sin(2 * np.pi * g.nodes)
    traj = static_trajectory(u, np.zeros(256), [0.0, 0.5, 1.0, 1.5], 256)
    with pytest.raises(EllipticStart):
        trace(traj, 0.25, Family.first)  # u(0.25) = 0.3 > 0


def test_window_too_short():
    traj = synthetic_trajectory(lambda t: -1.0, 0.0, [0.0])
    with pytest.raises(WindowTooShort):
        trace(traj, 0.5, Family.first)


def test_left_trajectory_window():
    traj = synthetic_trajectory(lambda t: -1.0, 0.0, np.linspace(0, 2, 9))
    c = trace(traj, 0.5, Family.first, t_start=5.0)
    assert c.termination is Termination.left_trajectory_window


def test_warns_when_snapshots_too_sparse():
    g = PeriodicGrid(64)
    traj = run(QUAD, constant_state(g, -1.0, 0.0), 0.0,
               SolverConfig(t_max=1.0, snapshot_stride=12))
    with pytest.warns(UserWarning, match="snapshot spacing"):
        trace(traj, 0.5, Family.first)


def test_synthetic_growth_is_B_plus():
    # -u = 1 + t grows without bound; forward curves are class B
    traj = synthetic_trajectory(lambda t: -(1.0 + t), 0.0,
                                np.linspace(0.0, 15.0, 121))
    c = trace(traj, 0.3, Family.first)
    assert classify(c, horizon=15.0) is ClassLabel.B_plus
    report = dual_growth_spotcheck(traj, 3)
    assert not report.ok  # engineered non-solution: detector must fire
    assert any(v["direction"] == "forward" for v in report.violations)


def test_spotcheck_constant_trajectory_clean(constant_traj):
    report = dual_growth_spotcheck(constant_traj, 4)
    assert report.ok
    labels = report.labels[(Direction.forward, Family.first)]
    assert all(lab is ClassLabel.A_plus for lab in labels)


@pytest.fixture(scope="module")
def wave_traj():
    from psyslab import crossing_time_oracle
    t_star = crossing_time_oracle(QUAD, -1.0, 0.3, 1)
    g = PeriodicGrid(512)
    s0 = simple_wave_state(QUAD, g, -1.0, 0.3, 1)
    return run(QUAD, s0, 0.0, SolverConfig(t_max=2.0 * t_star)), t_star


def test_simple_wave_invariant_transport(wave_traj):
    traj, _ = wave_traj
    sa = traj.series_arrays()
    grown = sa["max_abs_ux"] >= 10.0 * sa["max_abs_ux"][0]
    t10 = float(sa["t"][np.argmax(grown)])
    for fam in Family:
        for j in range(4):
            c = trace(traj, (j + 0.5) / 4, fam, t_stop=t10)
            assert invariant_drift(c) < 1e-4


def test_simple_wave_r2_constant_along_all_curves(wave_traj):
    # r2 is constant in the whole field, hence along every curve
    traj, _ = wave_traj
    sa = traj.series_arrays()
    grown = sa["max_abs_ux"] >= 10.0 * sa["max_abs_ux"][0]
    t10 = float(sa["t"][np.argmax(grown)])
    for j in range(4):
        c = trace(traj, (j + 0.5) / 4, Family.first, t_stop=t10)
        r2s = [s.r2 for s in c.samples]
        assert max(abs(r - r2s[0]) for r in r2s) < 1e-4


def test_prediction_triangulates_oracle(wave_traj):
    traj, t_star = wave_traj
    preds = []
    for j in range(16):
        b0 = gradient_beta(traj, j / 16, Family.first)
        c = trace(traj, j / 16, Family.first)
        tp = predict_blowup(c, b0)
        if tp is not None:
            preds.append(tp)
    assert preds
    assert abs(min(preds) - t_star) / t_star < 0.05
    assert abs(traj.t_detect - t_star) / t_star < 0.05


def test_spotcheck_wave_trajectory_clean(wave_traj):
    traj, _ = wave_traj
    assert dual_growth_spotcheck(traj, 4).ok


def test_gradient_beta_matches_analytic(wave_traj):
    # for the simple wave, r1_x = 2 sqrt(-u) u_x and beta = r1_x (-u)^(1/4)
    traj, _ = wave_traj
    x0 = 0.3
    u = -1.0 + 0.3 * np.sin(2 * np.pi * x0)
    ux = 0.3 * 2 * np.pi * np.cos(2 * np.pi * x0)
    analytic = 2.0 * np.sqrt(-u) * ux * (-u) ** 0.25
    assert gradient_beta(traj, x0, Family.first) == pytest.approx(analytic, rel=1e-6)
