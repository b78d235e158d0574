import numpy as np
import pytest

from spinsense import (
    DickeBasis,
    NoiseModel,
    TrajectoryConfig,
    TrajectoryIntegrityError,
    bootstrap_stderr,
    build_operator,
    coherent_state_after_first_pulse,
    collective_operator,
    conjugate_dephasing_propagate,
    dephasing_propagate,
    embed,
    evolve,
    full_space_propagate,
    ground_state,
    scalar_sde_check,
    split_dephasing_propagate,
    stochastic_ensemble_average,
    stochastic_trajectory_projectors,
)


# ---------------------------------------------------------------------------
# Full product-space propagation
# ---------------------------------------------------------------------------

def test_full_space_free_evolution_phases():
    n, omega, tau = 2, 1.3, 0.8
    result = full_space_propagate(n, omega, 0.0, NoiseModel(), tau, tol=1e-13)
    basis = DickeBasis(n)
    expected = dephasing_propagate(coherent_state_after_first_pulse(basis), omega, 0.0, tau)
    assert np.max(np.abs(result.state.matrix - expected.matrix)) < 1e-12
    assert result.leakage < 1e-12


def test_full_space_dephasing_matches_exact_propagator():
    n, omega, gamma_d, tau = 3, 0.6, 1.0, 1.0
    result = full_space_propagate(n, omega, 0.0, NoiseModel(gamma_d=gamma_d), tau, tol=1e-12)
    expected = dephasing_propagate(
        coherent_state_after_first_pulse(DickeBasis(n)), omega, gamma_d, tau
    )
    assert np.max(np.abs(result.state.matrix - expected.matrix)) < 1e-10
    assert result.leakage < 1e-12


def test_full_space_driven_matches_dicke_integration():
    n, omega, eta, gamma_d, tau = 4, 1.0, 1.0, 1.0, 1.0
    result = full_space_propagate(n, omega, eta, NoiseModel(gamma_d=gamma_d), tau, initial="ground")
    basis = DickeBasis(n)
    sz = build_operator("Sz", basis)
    sx = build_operator("Sx", basis)
    expected = evolve(ground_state(basis), omega * sz + 2 * eta * sx, [(gamma_d / 2, sz)], tau, 1e-11)
    assert np.max(np.abs(result.state.matrix - expected.matrix)) < 1e-8


def test_full_space_amplitude_noise():
    n, gamma_a, tau = 3, 0.5, 1.0
    result = full_space_propagate(n, 0.0, 0.0, NoiseModel(gamma_a=gamma_a), tau)
    basis = DickeBasis(n)
    sx = build_operator("Sx", basis)
    expected = evolve(
        coherent_state_after_first_pulse(basis),
        np.zeros((basis.dim, basis.dim)),
        [(2 * gamma_a, sx)],
        tau,
        1e-11,
    )
    assert np.max(np.abs(result.state.matrix - expected.matrix)) < 1e-8


def test_full_space_split_schemes():
    n, omega, gamma_d, tau = 4, 0.7, 1.0, 0.9
    twin = full_space_propagate(n, omega, 0.0, NoiseModel(gamma_d=gamma_d), tau, "twin-detuning")
    expected = split_dephasing_propagate(
        coherent_state_after_first_pulse(twin.state.basis), omega, -omega, gamma_d, tau
    )
    assert np.max(np.abs(twin.state.matrix - expected.matrix)) < 1e-8
    assert twin.leakage < 1e-12

    conj = full_space_propagate(n, omega, 0.0, NoiseModel(gamma_d=gamma_d), tau, "phase-conjugate")
    expected = conjugate_dephasing_propagate(
        coherent_state_after_first_pulse(conj.state.basis), omega, gamma_d, tau
    )
    assert np.max(np.abs(conj.state.matrix - expected.matrix)) < 1e-8


def test_full_space_twin_rabi_drive():
    # Driven split ensemble: opposite detunings, collective drive and noise.
    n, omega, eta, gamma_d = 4, 0.8, 1.0, 1.0
    tau = np.pi / (2 * eta)
    full = full_space_propagate(
        n, omega, eta, NoiseModel(gamma_d=gamma_d), tau, "twin-detuning", initial="ground"
    )
    basis = full.state.basis
    sz_sub = build_operator("Sz", basis.sub_basis())
    h = omega * (embed(sz_sub, 1, basis) - embed(sz_sub, 2, basis)) + 2 * eta * collective_operator(
        "Sx", basis
    )
    expected = evolve(
        ground_state(basis), h, [(gamma_d / 2, collective_operator("Sz", basis))], tau, 1e-11
    )
    assert np.max(np.abs(full.state.matrix - expected.matrix)) < 1e-8
    assert full.leakage < 1e-12
    # and the closed moment dynamics sees the same observables
    from spinsense import rabi_moment_expectations

    sz = collective_operator("Sz", basis)
    sig, sec = rabi_moment_expectations(n, omega, eta, gamma_d, tau, "twin-detuning")
    assert abs(sig - full.state.expectation(sz)) < 1e-8
    assert abs(sec - full.state.expectation(sz @ sz)) < 1e-8


def test_full_space_guard_and_validation():
    with pytest.raises(ValueError):
        full_space_propagate(5, 0.0, 0.0, NoiseModel(), 1.0)
    with pytest.raises(ValueError):
        full_space_propagate(3, 0.0, 0.0, NoiseModel(), 1.0, "twin-detuning")
    with pytest.raises(ValueError):
        full_space_propagate(2, 0.0, 0.0, NoiseModel(), 1.0, initial="thermal")


# ---------------------------------------------------------------------------
# Stochastic trajectories
# ---------------------------------------------------------------------------

def test_zero_rate_reproduces_unitary_evolution():
    n, omega, tau = 3, 0.9, 1.2
    cfg = TrajectoryConfig(64, dt=0.01, seed=7, noise_kind="phase")
    avg = stochastic_ensemble_average(n, omega, 0.0, "phase", 0.0, tau, cfg)
    expected = dephasing_propagate(
        coherent_state_after_first_pulse(DickeBasis(n)), omega, 0.0, tau
    )
    assert np.max(np.abs(avg.matrix - expected.matrix)) < 1e-12
    outers = stochastic_trajectory_projectors(n, omega, 0.0, "phase", 0.0, tau, cfg)
    assert np.max(np.abs(outers - outers[0])) < 1e-12  # zero variance across trajectories


def test_phase_noise_trajectories_match_master_equation():
    n, omega, gamma_d, tau = 4, 0.8, 1.0, 1.0
    cfg = TrajectoryConfig(10000, dt=0.01, seed=20240801, noise_kind="phase")
    outers = stochastic_trajectory_projectors(n, omega, 0.0, "phase", gamma_d, tau, cfg)
    avg = np.add.reduce(outers, axis=0) / outers.shape[0]
    stderr = bootstrap_stderr(outers, seed=1)
    target = dephasing_propagate(
        coherent_state_after_first_pulse(DickeBasis(n)), omega, gamma_d, tau
    ).matrix
    # floor absorbs elements with vanishing Monte-Carlo variance
    assert np.max(np.abs(avg - target) - 3 * stderr) < 1e-10


def test_amplitude_noise_trajectories_match_master_equation():
    n, gamma_a, tau = 4, 0.5, 1.0
    basis = DickeBasis(n)
    cfg = TrajectoryConfig(10000, dt=0.005, seed=20240802, noise_kind="amplitude")
    outers = stochastic_trajectory_projectors(n, 0.0, 0.0, "amplitude", gamma_a, tau, cfg)
    avg = np.add.reduce(outers, axis=0) / outers.shape[0]
    stderr = bootstrap_stderr(outers, seed=2)
    sx = build_operator("Sx", basis)
    target = evolve(
        coherent_state_after_first_pulse(basis),
        np.zeros((basis.dim, basis.dim)),
        [(2 * gamma_a, sx)],
        tau,
        1e-11,
    ).matrix
    assert np.max(np.abs(avg - target) - 3 * stderr) < 1e-10


def test_general_path_matches_commuting_path():
    # Drive + phase noise exercises the batched-eigendecomposition branch;
    # cross-check it against the master equation at modest statistics.
    n, omega, eta, gamma_d, tau = 2, 0.5, 0.8, 0.6, 0.8
    basis = DickeBasis(n)
    cfg = TrajectoryConfig(4000, dt=0.004, seed=11, noise_kind="phase")
    avg = stochastic_ensemble_average(n, omega, eta, "phase", gamma_d, tau, cfg, initial="ground")
    sz = build_operator("Sz", basis)
    sx = build_operator("Sx", basis)
    target = evolve(ground_state(basis), omega * sz + 2 * eta * sx, [(gamma_d / 2, sz)], tau, 1e-10)
    # Coarse agreement: weak-convergence bias plus Monte-Carlo noise.
    assert np.max(np.abs(avg.matrix - target.matrix)) < 0.02


def test_trajectory_reproducibility():
    cfg = TrajectoryConfig(500, dt=0.01, seed=99, noise_kind="phase")
    a = stochastic_ensemble_average(3, 0.4, 0.0, "phase", 1.0, 1.0, cfg)
    b = stochastic_ensemble_average(3, 0.4, 0.0, "phase", 1.0, 1.0, cfg)
    assert np.array_equal(a.matrix, b.matrix)
    c = stochastic_ensemble_average(3, 0.4, 0.0, "phase", 1.0, 1.0,
                                    TrajectoryConfig(500, dt=0.01, seed=100, noise_kind="phase"))
    assert not np.array_equal(a.matrix, c.matrix)


def test_trajectory_norms_preserved():
    cfg = TrajectoryConfig(256, dt=0.005, seed=5, noise_kind="amplitude")
    outers = stochastic_trajectory_projectors(4, 0.0, 0.0, "amplitude", 1.0, 1.0, cfg)
    traces = np.einsum("tii->t", outers).real
    assert np.max(np.abs(traces - 1.0)) < 1e-10


def test_monte_carlo_error_shrinks_with_doubling():
    args = (4, 0.8, 0.0, "phase", 1.0, 1.0)
    cfg_n = TrajectoryConfig(2000, dt=0.01, seed=3, noise_kind="phase")
    cfg_2n = TrajectoryConfig(4000, dt=0.01, seed=3, noise_kind="phase")
    se_n = bootstrap_stderr(stochastic_trajectory_projectors(*args, cfg_n), seed=4)
    se_2n = bootstrap_stderr(stochastic_trajectory_projectors(*args, cfg_2n), seed=4)
    ratio = np.mean(se_n) / np.mean(se_2n)
    assert 1.2 < ratio < 1.7  # ~ sqrt(2)


def test_trajectory_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(0, dt=0.01, seed=1)
    with pytest.raises(ValueError):
        TrajectoryConfig(10, dt=-0.1, seed=1)
    with pytest.raises(ValueError):
        TrajectoryConfig(10, dt=0.01, seed=1, noise_kind="thermal")
    cfg = TrajectoryConfig(10, dt=0.02, seed=1, noise_kind="phase")
    with pytest.raises(ValueError):
        stochastic_ensemble_average(2, 0.0, 0.0, "phase", 1.0, 1.0, cfg)  # dt*rate too big
    with pytest.raises(ValueError):
        stochastic_ensemble_average(2, 0.0, 0.0, "amplitude", 0.1, 1.0, cfg)  # kind mismatch


def test_ground_initial_state_option():
    cfg = TrajectoryConfig(16, dt=0.01, seed=2, noise_kind="phase")
    avg = stochastic_ensemble_average(3, 0.0, 0.0, "phase", 1.0, 1.0, cfg, initial="ground")
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.max(np.abs(avg.matrix - expected)) < 1e-12  # ground state is dephasing-invariant


# ---------------------------------------------------------------------------
# Scalar Stratonovich SDE
# ---------------------------------------------------------------------------

def test_scalar_sde_deterministic_limit():
    res = scalar_sde_check(0.7, 0.0, 1.0, 200, seed=1)
    assert abs(res.predicted_mean - np.exp(0.7)) < 1e-12
    assert abs(res.empirical_mean - np.exp(0.7)) < 1e-6
    assert res.standard_error < 1e-12


def test_scalar_sde_stratonovich_mean():
    res = scalar_sde_check(0.0, 1.0, 1.0, 20000, seed=31)
    assert abs(res.predicted_mean - np.exp(0.5)) < 1e-12
    assert abs(res.empirical_mean - res.predicted_mean) < 3 * res.standard_error


def test_scalar_sde_examples():
    res = scalar_sde_check(-1.0, 1.0, 2.0, 50000, seed=12)
    assert abs(res.predicted_mean - np.exp(-1.0)) < 1e-12
    assert abs(res.empirical_mean - res.predicted_mean) < 3 * res.standard_error


def test_scalar_sde_validation():
    with pytest.raises(ValueError):
        scalar_sde_check(0.0, 1.0, 0.0, 100, seed=1)
    with pytest.raises(ValueError):
        scalar_sde_check(0.0, 1.0, 1.0, 0, seed=1)
