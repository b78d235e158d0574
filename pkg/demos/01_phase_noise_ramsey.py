"""Ramsey interrogation under collective laser phase noise.

Walks through the central results for a single collectively-addressed
ensemble: the damped fringe, the closed-form sensitivity, the optimal
interrogation time, and the saturation of the optimized sensitivity with
atom number at ~0.951 gamma_d.

Run:  python3 demos/01_phase_noise_ramsey.py
Writes PNG figures next to this script when matplotlib is available.
"""

import numpy as np

import spinsense as ss

GAMMA_D = 1.0  # all rates in units of gamma_d

# --- one fringe at a fixed interrogation time ------------------------------
n, tau = 10, 1.0
omegas = np.linspace(-np.pi / tau, np.pi / tau, 401)
profile = ss.ramsey_profile(n, omegas, ss.NoiseModel(gamma_d=GAMMA_D), tau)

print(f"N = {n}, gamma_d*tau = {GAMMA_D * tau}")
print(f"  fringe contrast  : {profile.signal.max():.4f} (N/2 * exp(-gamma_d tau/2) "
      f"= {n / 2 * np.exp(-GAMMA_D * tau / 2):.4f})")
print(f"  sensitivity      : {profile.sensitivity:.6f}  at Omega = {profile.sensitivity_detuning:+.4f}")
print(f"  closed form      : {ss.ramsey_sensitivity_analytic(n, GAMMA_D, tau):.6f}")
print(f"  projection limit : {1 / (tau * np.sqrt(n)):.6f}")

# --- optimal interrogation time ---------------------------------------------
tau_star, sens_star = ss.optimize_tau(n, GAMMA_D)
print(f"\noptimal interrogation time: gamma_d*tau = {tau_star:.4f}, "
      f"delta_omega = {sens_star:.6f}")

# --- saturation with atom number --------------------------------------------
bound = ss.saturation_bound(GAMMA_D)
print(f"\nlarge-N floor of the optimized sensitivity: {bound:.6f} (~0.951 gamma_d)")
print(f"{'N':>8}  {'optimized delta_omega':>22}  {'projection 1/(tau* sqrt(N))':>28}")
n_values = [10, 100, 1000, 10000]
for nn in n_values:
    t_opt, s_opt = ss.optimize_tau(nn, GAMMA_D)
    print(f"{nn:>8}  {s_opt:>22.6f}  {1 / (t_opt * np.sqrt(nn)):>28.6f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not available; skipping plots")
else:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    taus = np.linspace(0.05, 6.0, 200)
    ax1.plot(taus, [ss.ramsey_sensitivity_analytic(n, GAMMA_D, t) for t in taus], "r-",
             label="phase noise")
    ax1.plot(taus, 1 / (taus * np.sqrt(n)), "k--", label="projection limit")
    ax1.set(xlabel=r"$\gamma_d\tau$", ylabel=r"$\delta\Omega/\gamma_d$", ylim=(0, 3),
            title=f"sensitivity vs interrogation time (N={n})")
    ax1.legend()

    nn = np.unique(np.round(np.geomspace(1, 1e4, 40)).astype(int))
    ax2.loglog(nn, [ss.optimize_tau(int(v), GAMMA_D)[1] for v in nn], "b.",
               label="optimized")
    ax2.axhline(bound, color="r", ls=":", label="saturation bound")
    ax2.loglog(nn, 1 / (tau_star * np.sqrt(nn)), "k--", label="projection at fixed tau*")
    ax2.set(xlabel="N", ylabel=r"$\delta\Omega/\gamma_d$", title="saturation with atom number")
    ax2.legend()
    fig.tight_layout()
    fig.savefig("demos/01_phase_noise_ramsey.png", dpi=150)
    print("\nwrote demos/01_phase_noise_ramsey.png")
