import numpy as np
import pytest

from spinsense import (
    NoiseModel,
    RamseyOutcome,
    amplitude_detuning_grid,
    amplitude_noise_sensitivity_curve,
    loglog_fit,
    ramsey_profile,
    ramsey_second_moment_analytic,
    ramsey_sensitivity_analytic,
    ramsey_signal_analytic,
    ramsey_simulate,
)

ALL_SCHEMES = ("standard", "twin-detuning", "phase-conjugate")


def test_signal_closed_form_values():
    assert abs(ramsey_signal_analytic(10, 0.0, 0.0, 0.0) - 5.0) < 1e-15
    assert abs(ramsey_signal_analytic(2, np.pi, 0.0, 1.0) + 1.0) < 1e-12
    assert abs(ramsey_signal_analytic(10, 0.0, 1.0, 1.0) - 5 * np.exp(-0.5)) < 1e-12
    # Oracle: full pulse-sequence simulation.
    out = ramsey_simulate(10, 0.0, NoiseModel(gamma_d=1.0), 1.0)
    assert abs(out.signal - 5 * np.exp(-0.5)) < 1e-12


def test_second_moment_closed_form_values():
    # tau = 0 reduces to the initial <S_x^2> = N^2/4.
    for n in (2, 7, 10):
        assert abs(ramsey_second_moment_analytic(n, 0.3, 0.3, 1.0, 0.0) - n**2 / 4) < 1e-12
    # Optimal working point, frozen from the pulse-sequence oracle.
    om = np.pi / 2
    assert abs(ramsey_second_moment_analytic(10, om, om, 1.0, 1.0) - 12.227478063588114) < 1e-9
    assert abs(ramsey_second_moment_analytic(10, om, -om, 1.0, 1.0) - 1.419169104045773) < 1e-9
    # Reduction to the hyperbolic forms at the optimum.
    x = 1.0
    assert abs(
        ramsey_second_moment_analytic(10, om, om, 1.0, 1.0)
        - 2.5 * np.exp(-x) * (10 * np.sinh(x) + np.cosh(x))
    ) < 1e-12
    assert abs(
        ramsey_second_moment_analytic(10, om, -om, 1.0, 1.0) - 2.5 * np.exp(-x) * np.cosh(x)
    ) < 1e-12


def test_sensitivity_closed_form_values():
    for n in (1, 4, 10):
        tau = 0.8
        assert abs(ramsey_sensitivity_analytic(n, 0.0, tau) - 1 / (tau * np.sqrt(n))) < 1e-12
    # Frozen from the detuning-grid minimization oracle (801 points).
    assert abs(ramsey_sensitivity_analytic(10, 1.0, 1.0, "standard") - 1.1530553301559079) < 0.005 * 1.15
    assert abs(ramsey_sensitivity_analytic(10, 1.0, 1.0, "twin-detuning") - 0.3928246890828632) < 0.005 * 0.39
    with pytest.raises(ValueError):
        ramsey_sensitivity_analytic(10, 1.0, 0.0)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
@pytest.mark.parametrize("x", [0.2, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", [2, 4, 10, 12])
def test_simulation_matches_analytic(scheme, x, n):
    gamma_d = 1.0
    tau = x / gamma_d
    noise = NoiseModel(gamma_d=gamma_d)
    for omega_tau in (0.0, np.pi / 4, np.pi / 2):
        omega = omega_tau / tau
        out = ramsey_simulate(n, omega, noise, tau, scheme)
        sign = -1.0 if scheme != "standard" else 1.0
        expected_second = ramsey_second_moment_analytic(n, omega, sign * omega, gamma_d, tau)
        assert abs(out.signal - ramsey_signal_analytic(n, omega, gamma_d, tau)) < 1e-9
        assert abs(out.second_moment - expected_second) < 1e-9


def test_noiseless_on_resonance_full_contrast():
    for scheme in ALL_SCHEMES:
        out = ramsey_simulate(4, 0.0, NoiseModel(), 1.0, scheme)
        assert abs(abs(out.signal) - 2.0) < 1e-12
        assert out.signal > 0  # this pulse-sign convention gives +N/2


def test_signal_periodicity_and_symmetry():
    n, gamma_d, tau = 6, 0.7, 1.3
    noise = NoiseModel(gamma_d=gamma_d)
    for omega in (0.2, 1.1):
        a = ramsey_signal_analytic(n, omega, gamma_d, tau)
        b = ramsey_signal_analytic(n, omega + 2 * np.pi / tau, gamma_d, tau)
        assert abs(a - b) < 1e-12
        sim_a = ramsey_simulate(n, omega, noise, tau).signal
        sim_b = ramsey_simulate(n, omega + 2 * np.pi / tau, noise, tau).signal
        assert abs(sim_a - sim_b) < 1e-10
        for scheme in ALL_SCHEMES:
            nn = 6 if scheme == "standard" else 6
            plus = ramsey_simulate(nn, omega, noise, tau, scheme).signal
            minus = ramsey_simulate(nn, -omega, noise, tau, scheme).signal
            assert abs(plus - minus) < 1e-10


@pytest.mark.parametrize("n", [2, 4, 10, 40])
def test_twin_std_dev_smaller_at_working_point(n):
    for x in (0.3, 1.0, 2.0):
        tau = x
        omega = np.pi / 2 / tau
        noise = NoiseModel(gamma_d=1.0)
        std = ramsey_simulate(n, omega, noise, tau, "standard").std_dev
        twin = ramsey_simulate(n, omega, noise, tau, "twin-detuning").std_dev
        assert twin < std


def test_sensitivity_ordering_and_equality_at_zero_noise():
    for x in (0.5, 1.0, 3.0):
        std = ramsey_sensitivity_analytic(8, 1.0, x, "standard")
        twin = ramsey_sensitivity_analytic(8, 1.0, x, "twin-detuning")
        assert std > twin
    assert ramsey_sensitivity_analytic(8, 0.0, 1.0, "standard") == pytest.approx(
        ramsey_sensitivity_analytic(8, 0.0, 1.0, "twin-detuning"), abs=1e-15
    )


def test_split_schemes_reject_odd_n():
    with pytest.raises(ValueError):
        ramsey_simulate(5, 0.1, NoiseModel(gamma_d=1.0), 1.0, "twin-detuning")
    with pytest.raises(ValueError):
        ramsey_simulate(5, 0.1, NoiseModel(gamma_d=1.0), 1.0, "phase-conjugate")


def test_explicit_detuning_pair():
    noise = NoiseModel(gamma_d=0.8)
    a = ramsey_simulate(4, 0.6, noise, 1.0, "twin-detuning")
    b = ramsey_simulate(4, (0.6, -0.6), noise, 1.0, "twin-detuning")
    assert abs(a.signal - b.signal) < 1e-14
    assert abs(a.second_moment - b.second_moment) < 1e-14
    c = ramsey_simulate(4, (0.6, 0.6), noise, 1.0, "twin-detuning")
    expected = ramsey_second_moment_analytic(4, 0.6, 0.6, 0.8, 1.0)
    assert abs(c.second_moment - expected) < 1e-10
    with pytest.raises(ValueError):
        ramsey_simulate(4, (0.6, -0.6), noise, 1.0, "standard")


def test_simulate_equals_literal_pulse_sequence():
    # Oracle: apply the rotations explicitly instead of folding them in.
    from spinsense import (
        CollectiveState,
        DickeBasis,
        SplitBasis,
        collective_operator,
        dephasing_propagate,
        ground_state,
        rotation_y,
        split_dephasing_propagate,
    )

    omega, gamma_d, tau = 0.7, 1.1, 0.9
    for n, scheme in ((3, "standard"), (4, "twin-detuning")):
        basis = DickeBasis(n) if scheme == "standard" else SplitBasis(n)
        pulse = rotation_y(basis, np.pi / 2)
        rho = pulse @ ground_state(basis).matrix @ pulse.conj().T
        state = CollectiveState(basis, rho, check=False)
        if scheme == "standard":
            state = dephasing_propagate(state, omega, gamma_d, tau)
        else:
            state = split_dephasing_propagate(state, omega, -omega, gamma_d, tau)
        rho = pulse @ state.matrix @ pulse.conj().T
        sz = collective_operator("Sz", basis)
        signal = float(np.real(np.trace(sz @ rho)))
        second = float(np.real(np.trace(sz @ sz @ rho)))
        out = ramsey_simulate(n, omega, NoiseModel(gamma_d=gamma_d), tau, scheme)
        assert abs(out.signal - signal) < 1e-12
        assert abs(out.second_moment - second) < 1e-12


def test_profile_fast_path_matches_pointwise_simulation():
    n, tau = 4, 0.9
    noise = NoiseModel(gamma_d=1.1)
    omegas = np.linspace(-2.0, 2.0, 11)
    for scheme in ALL_SCHEMES:
        res = ramsey_profile(n, omegas, noise, tau, scheme)
        for i, omega in enumerate(omegas):
            out = ramsey_simulate(n, omega, noise, tau, scheme)
            assert abs(res.signal[i] - out.signal) < 1e-11
            assert abs(res.second_moment[i] - out.second_moment) < 1e-11


def test_amplitude_noise_exceeds_projection_limit():
    # gamma_a * tau = 5 pushes the sensitivity well above 1/(tau sqrt(N)).
    n, gamma_a, tau = 10, 1.0, 5.0
    grid = amplitude_detuning_grid(gamma_a, tau, 101)
    res = ramsey_profile(n, grid, NoiseModel(gamma_a=gamma_a), tau, method="lindblad", tol=1e-9)
    assert res.sensitivity > 1.5 / (tau * np.sqrt(n))
    moments_res = ramsey_profile(n, grid, NoiseModel(gamma_a=gamma_a), tau, method="moments")
    assert abs(moments_res.sensitivity - res.sensitivity) < 1e-6 * res.sensitivity


def test_amplitude_curve_slopes():
    pts = amplitude_noise_sensitivity_curve(6, 1.0, np.geomspace(0.02, 0.08, 4), n_detunings=401)
    slope, _, _ = loglog_fit([(p.control, p.sensitivity) for p in pts])
    assert abs(slope + 1.0) < 0.05
    pts = amplitude_noise_sensitivity_curve(6, 1.0, np.geomspace(20, 80, 4), n_detunings=401)
    slope, _, _ = loglog_fit([(p.control, p.sensitivity) for p in pts])
    assert abs(slope + 0.5) < 0.05


def test_amplitude_curve_validation():
    with pytest.raises(ValueError):
        amplitude_noise_sensitivity_curve(6, 0.0, [1.0])
    with pytest.raises(ValueError):
        amplitude_noise_sensitivity_curve(6, 1.0, [])


def test_outcome_invariants():
    out = RamseyOutcome(0.1, 1.0, 2.0, 4.16)
    assert out.std_dev == pytest.approx(np.sqrt(0.16))
    with pytest.raises(ValueError):
        RamseyOutcome(0.1, 1.0, 2.0, 3.9)  # second moment below signal^2


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_outcome_bounds_on_simulated_grids(scheme):
    n, tau = 8, 1.1
    noise = NoiseModel(gamma_d=0.9)
    res = ramsey_profile(n, np.linspace(-3, 3, 101), noise, tau, scheme)
    assert np.max(np.abs(res.signal)) <= n / 2 + 1e-10
    assert np.min(res.second_moment) >= -1e-9
    assert np.max(res.second_moment) <= n**2 / 4 + 1e-9
    assert np.all(res.second_moment >= res.signal**2 - 1e-10)


def test_simulate_method_validation():
    with pytest.raises(ValueError):
        ramsey_simulate(4, 0.1, NoiseModel(), 1.0, method="magic")
    with pytest.raises(ValueError):
        ramsey_simulate(4, 0.1, NoiseModel(gamma_a=0.5), 1.0, method="exact")
    with pytest.raises(ValueError):
        ramsey_profile(4, np.linspace(-1, 1, 7), NoiseModel(gamma_a=0.5), 1.0, method="exact")


def test_profile_moments_requires_standard_scheme():
    with pytest.raises(ValueError):
        ramsey_profile(4, np.linspace(-1, 1, 7), NoiseModel(gamma_a=0.1), 1.0, "twin-detuning", method="moments")
