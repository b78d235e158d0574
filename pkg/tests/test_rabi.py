import numpy as np
import pytest

from spinsense import (
    DegenerateProfileError,
    RabiProfile,
    default_detuning_grid,
    loglog_fit,
    rabi_profile,
    rabi_scaling_study,
    rabi_sensitivity,
)
from spinsense.basis import CollectiveState, DickeBasis


@pytest.mark.parametrize("method", ["moments", "lindblad"])
def test_resonant_pi_pulse_full_inversion(method):
    n = 4
    profile = rabi_profile(n, 1.0, 0.0, np.linspace(-1, 1, 5), method=method, tol=1e-10)
    i0 = 2  # Omega = 0
    assert abs(profile.signal[i0] - n / 2) < 1e-8
    assert profile.tau == pytest.approx(np.pi / 2)


def test_far_detuned_drive_leaves_ground_state():
    n = 4
    grid = np.array([-40.0, -30.0, 0.0, 30.0, 40.0])
    profile = rabi_profile(n, 1.0, 0.0, grid)
    assert profile.signal[0] < -n / 2 + 0.02 * n
    assert profile.signal[-1] < -n / 2 + 0.02 * n


def test_phase_noise_lowers_resonance_peak():
    n, eta, gamma_d = 10, 0.2, 1.0
    noisy = rabi_profile(n, eta, gamma_d)
    clean = rabi_profile(n, eta, 0.0, noisy.detunings)
    i0 = np.argmin(np.abs(noisy.detunings))
    assert noisy.signal[i0] < n / 2 - 0.1
    assert noisy.signal[i0] < clean.signal[i0]


@pytest.mark.parametrize("scheme", ["standard", "twin-detuning"])
def test_methods_agree(scheme):
    n, eta, gamma_d = 4, 1.0, 1.0
    grid = np.linspace(-4, 4, 21)
    a = rabi_profile(n, eta, gamma_d, grid, scheme, method="moments")
    b = rabi_profile(n, eta, gamma_d, grid, scheme, method="lindblad", tol=1e-10)
    assert np.max(np.abs(a.signal - b.signal)) < 1e-7
    assert np.max(np.abs(a.second_moment - b.second_moment)) < 1e-7


@pytest.mark.parametrize("scheme", ["standard", "twin-detuning"])
def test_profile_symmetry(scheme):
    profile = rabi_profile(6, 1.0, 1.0, np.linspace(-5, 5, 41), scheme)
    assert np.max(np.abs(profile.signal - profile.signal[::-1])) < 1e-9


def test_lindblad_states_stay_physical():
    # Spot-check the integrator output at a few grid points.
    from spinsense import build_operator, evolve, ground_state

    n, eta, gamma_d = 6, 1.0, 1.0
    basis = DickeBasis(n)
    sz = build_operator("Sz", basis)
    sx = build_operator("Sx", basis)
    for omega in (0.0, 1.5, 4.0):
        state = evolve(ground_state(basis), omega * sz + 2 * eta * sx, [(gamma_d / 2, sz)], np.pi / 2, 1e-10)
        CollectiveState(basis, state.matrix)  # full invariant check


def test_sensitivity_single_atom_smoke():
    profile = rabi_profile(1, 1.0, 0.0)
    sens = rabi_sensitivity(profile)
    assert np.isfinite(sens) and sens > 0


def test_sub_sql_gain_saturates():
    # Standard scheme at eta = gamma_d: doubling N from 10 to 20 buys less
    # than the projection-noise factor 1/sqrt(2).
    s10 = rabi_sensitivity(rabi_profile(10, 1.0, 1.0))
    s20 = rabi_sensitivity(rabi_profile(20, 1.0, 1.0))
    assert s20 < s10
    assert s20 / s10 > 2**-0.5


def test_noiseless_scaling_is_projection_like():
    for scheme in ("standard", "twin-detuning"):
        points, slope = rabi_scaling_study([4, 8, 12, 16, 24], 1.0, 0.0, scheme)
        assert abs(slope + 0.5) < 0.03


def test_twin_scaling_beats_standard():
    n_values = [4, 8, 12, 16, 20]
    _, slope_std = rabi_scaling_study(n_values, 1.0, 1.0, "standard")
    _, slope_twin = rabi_scaling_study(n_values, 1.0, 1.0, "twin-detuning")
    assert slope_twin < slope_std  # steeper decrease for the twin scheme
    assert slope_twin < -0.3


def test_grid_refinement_invariance():
    n, eta, gamma_d = 8, 1.0, 1.0
    sens = []
    for n_points in (401, 801):
        profile = rabi_profile(n, eta, gamma_d, default_detuning_grid(eta, gamma_d, n_points))
        sens.append(rabi_sensitivity(profile))
    assert abs(sens[1] - sens[0]) < 0.01 * sens[0]


def test_degenerate_profile_raises():
    grid = np.linspace(-1, 1, 21)
    flat = RabiProfile(4, "standard", 1.0, 0.0, grid, np.zeros(21), np.ones(21))
    with pytest.raises(DegenerateProfileError):
        rabi_sensitivity(flat)


def test_profile_validation():
    grid = np.linspace(-1, 1, 11)
    with pytest.raises(ValueError):
        RabiProfile(4, "standard", 0.0, 0.0, grid, np.zeros(11), np.zeros(11))  # eta
    with pytest.raises(ValueError):
        RabiProfile(4, "standard", 1.0, 0.0, grid[::-1], np.zeros(11), np.zeros(11))
    with pytest.raises(ValueError):
        RabiProfile(4, "standard", 1.0, 0.0, grid, np.full(11, 3.0), np.full(11, 9.0))


def test_rabi_input_validation():
    with pytest.raises(ValueError):
        rabi_profile(4, 1.0, 1.0, scheme="phase-conjugate")
    with pytest.raises(ValueError):
        rabi_profile(4, 0.0, 1.0)
    with pytest.raises(ValueError):
        rabi_profile(5, 1.0, 1.0, scheme="twin-detuning", method="lindblad")
    with pytest.raises(ValueError):
        rabi_scaling_study([4, 6, 9, 12], 1.0, 1.0, "twin-detuning")
    with pytest.raises(ValueError):
        rabi_scaling_study([4, 8, 12], 1.0, 1.0)  # too few points


def test_default_grid_span():
    grid = default_detuning_grid(0.2, 1.0, 401)
    assert grid.size == 401
    assert grid[0] == pytest.approx(-6.0)
    assert grid[-1] == pytest.approx(6.0)
    grid = default_detuning_grid(2.0, 1.0, 11)
    assert grid[-1] == pytest.approx(12.0)


def test_scaling_points_match_profiles():
    # The shared-propagator scaling path must agree with per-N profiles.
    points, _ = rabi_scaling_study([4, 8, 12, 16], 1.0, 1.0, "twin-detuning")
    for n, sens in [(4, points[0].sensitivity), (16, points[3].sensitivity)]:
        direct = rabi_sensitivity(rabi_profile(n, 1.0, 1.0, scheme="twin-detuning"))
        assert abs(sens - direct) < 1e-12
