"""Independent oracles: trajectories, brute-force Hilbert space, scalar SDE.

Three routes that share no mathematics with the Dicke-basis master-equation
code certify it:

1. stochastic trajectories of the noisy von Neumann equation (unitary per
   realization, Gaussian white-noise kicks on detuning or drive),
2. brute-force Lindblad propagation in the full 2^N product space, projected
   back onto the symmetric subspace,
3. a scalar Stratonovich SDE whose averaged growth rate a0 + b0^2/2 pins the
   stochastic-calculus convention.

Run:  python3 demos/05_oracle_crosschecks.py
"""

import numpy as np

import spinsense as ss
from spinsense.validation import report_lines, run_validation

# --- one worked example of each oracle --------------------------------------
n, omega, gamma_d, tau = 4, 0.8, 1.0, 1.0
basis = ss.DickeBasis(n)
state0 = ss.coherent_state_after_first_pulse(basis)
master = ss.dephasing_propagate(state0, omega, gamma_d, tau)

cfg = ss.TrajectoryConfig(n_trajectories=5000, dt=0.01, seed=42, noise_kind="phase")
outers = ss.stochastic_trajectory_projectors(n, omega, 0.0, "phase", gamma_d, tau, cfg)
avg = outers.mean(axis=0)
stderr = ss.bootstrap_stderr(outers, seed=43)
worst = np.max((np.abs(avg - master.matrix)) / np.maximum(stderr, 1e-30))
print(f"trajectory average vs master equation (N={n}, {cfg.n_trajectories} trajectories):")
print(f"  largest deviation = {worst:.2f} standard errors")

full = ss.full_space_propagate(n, omega, 0.0, ss.NoiseModel(gamma_d=gamma_d), tau)
print(f"\nfull 2^{n} product space vs Dicke basis:")
print(f"  max element difference = {np.max(np.abs(full.state.matrix - master.matrix)):.2e}")
print(f"  population outside the symmetric subspace = {full.leakage:.2e}")

res = ss.scalar_sde_check(a0=-1.0, b0=1.0, t_final=2.0, n_trajectories=50000, seed=7)
print(f"\nscalar Stratonovich SDE dx = a0 x dt + b0 x o dW:")
print(f"  sample mean {res.empirical_mean:.5f} vs exp((a0+b0^2/2)t) = {res.predicted_mean:.5f} "
      f"(+- {res.standard_error:.5f})")

# --- the full battery, as run by `spinsense validate` ------------------------
print("\nfull validation battery (fast level):")
for line in report_lines(run_validation("fast", seed=20240801)):
    print(" ", line)
