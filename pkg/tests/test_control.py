import numpy as np
import pytest

from src.atlas import atlas_from_positions
from src.control import (
    ExternalDynamics, InternalDynamics, MpcConfig, Reference, assemble_qp, build_prediction,
    build_quadrangle, place_yaw_gains, quadrangle_from_vertices, run_tracking_sim, safety_check,
    shift_matrix, solve_qp, spectral_radius, step_external, step_internal,
)
from src.errors import ValidationError


def _lattice(m_psi, m_phi, h=1.0):
    R, C = np.meshgrid(np.arange(m_psi), np.arange(m_phi), indexing="ij")
    return np.stack([C * h, R * h], axis=-1).astype(float)


# --- external dynamics ---

def test_shift_matrix_is_nilpotent():
    N = shift_matrix()
    assert np.any(np.linalg.matrix_power(N, 3))
    assert not np.any(np.linalg.matrix_power(N, 4))


def test_step_external_examples():
    dyn = ExternalDynamics.build(0.1)
    np.testing.assert_array_equal(step_external(dyn, np.zeros(12), np.zeros(3)), np.zeros(12))
    x = np.zeros(12)
    x[9] = 1.0
    nxt = step_external(dyn, x, np.zeros(3))
    np.testing.assert_allclose(nxt[6:9], [0.1, 0.0, 0.0])
    np.testing.assert_array_equal(nxt[0:6], np.zeros(6))


def test_step_external_matches_recursion():
    dt = 0.01
    dyn = ExternalDynamics.build(dt)
    u = np.array([1.0, 0.0, 0.0])
    x = np.zeros(12)
    r, v, a, j = (np.zeros(3) for _ in range(4))
    for _ in range(100):
        x = step_external(dyn, x, u)
        r, v, a, j = r + dt * v, v + dt * a, a + dt * j, j + dt * u
    np.testing.assert_allclose(x, np.concatenate([r, v, a, j]), rtol=1e-12, atol=1e-15)


def test_bad_dt():
    with pytest.raises(ValidationError):
        ExternalDynamics.build(0.0)


# --- yaw loop ---

def test_default_yaw_gains():
    g = place_yaw_gains(0.05, (0.9, 0.9))
    assert g == pytest.approx((-0.2, -0.2))
    assert MpcConfig().yaw_gains == pytest.approx((-0.2, -0.2))
    dyn = InternalDynamics.build(0.05, g)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(dyn.A_psi).real), [0.9, 0.9], atol=1e-6)


def test_yaw_decays_within_66_steps():
    dyn = InternalDynamics.build(0.05, place_yaw_gains(0.05))
    z0 = np.array([1.0, -0.1 / 0.05])
    z = z0.copy()
    for _ in range(66):
        z = step_internal(dyn, z)
    assert np.linalg.norm(z) < 1e-3 * np.linalg.norm(z0)


def test_yaw_decay_bound():
    dyn = InternalDynamics.build(0.05, place_yaw_gains(0.05))
    assert dyn.spectral_radius == pytest.approx(0.9, abs=1e-6)
    z = np.array([1.0, 0.0])
    np.testing.assert_array_equal(step_internal(dyn, np.zeros(2)), np.zeros(2))
    for k in range(200):
        assert np.linalg.norm(z) <= dyn.decay_bound(k) * (1.0 + 1e-12)
        z = step_internal(dyn, z)


def test_distinct_poles_bound():
    g = place_yaw_gains(0.1, (0.5, 0.8))
    dyn = InternalDynamics.build(0.1, g)
    assert spectral_radius(dyn.A_psi) == pytest.approx(0.8)
    z = np.array([0.3, -1.0])
    for k in range(60):
        assert np.linalg.norm(z) <= dyn.decay_bound(k) * np.linalg.norm([0.3, -1.0]) * (1.0 + 1e-12)
        z = step_internal(dyn, z)


def test_unstable_yaw_gains_rejected():
    with pytest.raises(ValidationError, match="unstable"):
        InternalDynamics.build(0.05, (0.0, 0.0))


# --- quadrangles ---

def test_unit_square_quadrangle():
    q = quadrangle_from_vertices([[0, 0], [1, 0], [1, 1], [0, 1]])
    np.testing.assert_array_equal(q.Lambda, [[0, -1], [1, 0], [0, 1], [-1, 0]])
    np.testing.assert_array_equal(q.Gamma, [0, 1, 1, 0])
    assert safety_check(q, (0.5, 0.5))
    assert np.all(q.slack((0.5, 0.5)) > 0)
    assert not safety_check(q, (1.2, 0.5))
    assert safety_check(q, (1.0, 0.3))
    with pytest.raises(ValidationError, match="counterclockwise"):
        quadrangle_from_vertices([[0, 0], [0, 1], [1, 1], [1, 0]])


def test_skewed_quadrangle_matches_determinants():
    rng = np.random.default_rng(7)
    V = np.array([[0.0, 0.0], [2.1, 0.3], [2.5, 1.9], [-0.2, 1.4]])
    q = quadrangle_from_vertices(V)
    pts = rng.uniform(-1.0, 3.0, size=(1000, 2))
    for p in pts:
        dets = [
            np.linalg.det(np.array([[V[j, 0], V[(j + 1) % 4, 0], p[0]],
                                    [V[j, 1], V[(j + 1) % 4, 1], p[1]],
                                    [1.0, 1.0, 1.0]]))
            for j in range(4)
        ]
        np.testing.assert_allclose(q.slack(p), dets, atol=1e-12)


def test_build_quadrangle_on_lattice():
    atlas = atlas_from_positions(_lattice(5, 5))
    q = build_quadrangle(atlas, (2, 2))
    np.testing.assert_array_equal(q.vertices, [[1, 1], [3, 1], [3, 3], [1, 3]])
    assert not q.clamped
    # unnormalized edge normals: slack is edge length times distance
    assert q.min_slack(atlas.below[2, 2]) == 2.0
    rim = build_quadrangle(atlas, (0, 0))
    assert rim.clamped
    np.testing.assert_array_equal(rim.vertices, [[0, 0], [1, 0], [1, 1], [0, 1]])
    assert safety_check(rim, (0.0, 0.0))


# --- prediction and QP assembly ---

def test_prediction_single_step():
    dyn = ExternalDynamics.build(0.1)
    pred = build_prediction(dyn, 1)
    np.testing.assert_array_equal(pred.G, dyn.A_p)
    np.testing.assert_array_equal(pred.H, dyn.B_p)
    assert pred.C_p.shape == (2, 12)


@pytest.mark.parametrize("n_tau", [1, 3, 10])
def test_prediction_matches_iterated_dynamics(n_tau):
    dyn = ExternalDynamics.build(0.1)
    pred = build_prediction(dyn, n_tau)
    rng = np.random.default_rng(n_tau)
    for _ in range(100):
        x = rng.normal(size=12)
        U = rng.normal(size=3 * n_tau)
        Y = pred.G @ x + pred.H @ U
        xi = x.copy()
        for i in range(n_tau):
            xi = step_external(dyn, xi, U[3 * i:3 * i + 3])
            np.testing.assert_allclose(Y[12 * i:12 * (i + 1)], xi, rtol=0, atol=1e-12)
        sel = pred.C_p @ Y
        assert sel.shape == (2 * n_tau,)
        np.testing.assert_array_equal(sel[0::2], Y[0::12])
        np.testing.assert_array_equal(sel[1::2], Y[1::12])


def _hover_state(x=2.0, y=2.0, z0=10.0):
    s = np.zeros(12)
    s[0:3] = (x, y, z0)
    return s


def test_zero_beta_reduces_to_input_energy():
    cfg = MpcConfig(beta=0.0, n_tau=3)
    dyn = ExternalDynamics.build(cfg.dt)
    atlas = atlas_from_positions(_lattice(5, 5))
    quad = build_quadrangle(atlas, (2, 2))
    window = np.array([[3.0, 3.0]] * 3)
    prob = assemble_qp(dyn, cfg, _hover_state(), window, [quad] * 3)
    np.testing.assert_array_equal(prob.W1, np.eye(9))
    np.testing.assert_array_equal(prob.w2, np.zeros(9))
    np.testing.assert_array_equal(prob.b_eq, np.zeros(3))
    sol = solve_qp(prob)
    assert sol.ok
    np.testing.assert_allclose(sol.U, 0.0, atol=1e-12)


def test_qp_matches_cost_by_finite_differences():
    rng = np.random.default_rng(11)
    n = 5
    cfg = MpcConfig(n_tau=n, beta=3.0, f_diag=(2.0, 0.5))
    dyn = ExternalDynamics.build(cfg.dt)
    x = rng.normal(size=12)
    window = rng.normal(size=(n, 2))
    quad = quadrangle_from_vertices([[-5, -5], [5, -5], [5, 5], [-5, 5]])
    prob = assemble_qp(dyn, cfg, x, window, [quad] * n)
    f = np.array(cfg.f_diag)

    def cost(U):
        total, state = 0.0, x
        for h, u in enumerate(U.reshape(n, 3)):
            state = step_external(dyn, state, u)
            total += cfg.beta * float(np.sum(f * (state[:2] - window[h]) ** 2))
        return total + float(U @ U)

    # position only reacts to input after the chain of integrators
    assert np.abs(prob.W1 - np.eye(3 * n)).max() > 0.0
    U = rng.normal(size=3 * n)
    step = 1e-6
    fd = np.array([(cost(U + step * e) - cost(U - step * e)) / (2 * step) for e in np.eye(3 * n)])
    np.testing.assert_allclose(fd, 2.0 * (prob.W1 @ U + prob.w2), atol=1e-4)
    V = rng.normal(size=3 * n)
    assert prob.objective(U) - prob.objective(V) == pytest.approx(cost(U) - cost(V), rel=1e-9, abs=1e-8)


def test_assemble_qp_rejects_bad_window():
    cfg = MpcConfig(n_tau=2)
    dyn = ExternalDynamics.build(cfg.dt)
    quad = quadrangle_from_vertices([[0, 0], [1, 0], [1, 1], [0, 1]])
    with pytest.raises(ValidationError, match="window"):
        assemble_qp(dyn, cfg, _hover_state(), np.zeros((3, 2)), [quad, quad])


# --- closed loop ---

def test_reference_schedule():
    ref = Reference(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]]), hold_steps=10)
    assert ref.schedule_end == 20
    np.testing.assert_allclose(ref.position(5), [0.5, 0.0])
    np.testing.assert_allclose(ref.position(15), [1.0, 1.0])
    np.testing.assert_allclose(ref.position(99), [1.0, 2.0])
    assert [ref.waypoint_index(t) for t in (0, 4, 5, 14, 15, 30)] == [0, 0, 1, 1, 2, 2]


def test_single_waypoint_is_equilibrium():
    atlas = atlas_from_positions(_lattice(5, 5))
    res = run_tracking_sim(atlas, [(2, 2)], atlas.below[2, 2][None, :], MpcConfig(), progress=False)
    assert res.reached
    assert np.abs(res.log[["ux", "uy", "uz"]].to_numpy()).max() < 1e-9
    assert res.min_slack() >= 0.0
    assert res.max_altitude_error(10.0) == 0.0


def test_straight_line_tracking_stays_in_tube():
    atlas = atlas_from_positions(_lattice(5, 10))
    nodes = [(2, c) for c in range(1, 9)]
    waypoints = np.array([atlas.below[r, c] for r, c in nodes])
    cfg = MpcConfig()
    res = run_tracking_sim(atlas, nodes, waypoints, cfg, progress=False)
    assert res.reached
    assert res.steps <= cfg.max_steps
    log = res.log
    for pos, wp in zip(log[["x", "y"]].to_numpy(), res.waypoint_of_step):
        assert safety_check(res.quadrangles[wp], pos, tol=1e-8)
    assert res.max_altitude_error(cfg.z0) <= 1e-6
    assert np.linalg.norm(log[["x", "y"]].to_numpy()[-1] - waypoints[-1]) <= 0.5
    # yaw regulated in the background
    assert np.linalg.norm(res.yaw[-1]) < 1e-3 * np.linalg.norm(cfg.yaw0)


def test_start_outside_first_quadrangle():
    atlas = atlas_from_positions(_lattice(5, 5))
    x0 = _hover_state(x=4.0, y=4.0)
    with pytest.raises(ValidationError, match="outside the first quadrangle"):
        run_tracking_sim(atlas, [(1, 1)], atlas.below[1, 1][None, :], MpcConfig(), x0=x0, progress=False)


def test_mpc_config_sections():
    cfg = MpcConfig.from_mapping({"control": {"n_tau": 5, "f_diag": [1, 2], "k_psi": [-0.1, -0.3]}})
    assert cfg.n_tau == 5 and cfg.k_psi == (-0.1, -0.3)
    assert cfg.weight_diagonal().tolist() == [1.0, 2.0] * 5
    with pytest.raises(ValueError, match="f_diag"):
        MpcConfig.from_mapping({"control": {"n_tau": 3, "f_diag": [1, 2, 3]}})
    with pytest.raises(ValueError, match="Invalid config value"):
        MpcConfig.from_mapping({"control": {"dt": "fast"}})
