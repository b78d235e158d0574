"""Twin-beam interrogation: cancelling collective phase noise.

Splitting the ensemble in two and driving the halves with opposite detunings
turns the free evolution into an effective time reversal while the laser
noise stays collective.  The Ramsey signal is unchanged, but its quantum
standard deviation collapses exactly at the steepest fringe flanks, and the
optimized sensitivity recovers the 1/sqrt(N) scaling at ~0.969 gamma_d/sqrt(N).

Run:  python3 demos/02_twin_beam_noise_cancellation.py
"""

import numpy as np

import spinsense as ss

GAMMA_D = 1.0
N, TAU = 100, 0.5  # interrogation at gamma_d*tau = 0.5

omegas = np.linspace(-1.5 * np.pi, 1.5 * np.pi, 601) / TAU
noise = ss.NoiseModel(gamma_d=GAMMA_D)
standard = ss.ramsey_profile(N, omegas, noise, TAU, "standard")
twin = ss.ramsey_profile(N, omegas, noise, TAU, "twin-detuning")
conjugate = ss.ramsey_profile(N, omegas, noise, TAU, "phase-conjugate")

print(f"N = {N}, gamma_d*tau = {GAMMA_D * TAU}")
print(f"  max |signal difference| standard vs twin: "
      f"{np.max(np.abs(standard.signal - twin.signal)):.2e}  (signal is scheme-independent)")
print(f"  max |twin - phase-conjugate| signal     : "
      f"{np.max(np.abs(twin.signal - conjugate.signal)):.2e}  (equivalent schemes)")

i_steep = np.argmin(np.abs(omegas - np.pi / 2 / TAU))
print(f"\nquantum standard deviation at the steepest flank (Omega*tau = pi/2):")
print(f"  standard : {standard.std_dev[i_steep]:.4f}")
print(f"  twin     : {twin.std_dev[i_steep]:.4f}")
print(f"  ratio    : {standard.std_dev[i_steep] / twin.std_dev[i_steep]:.1f}x reduction")

print(f"\nsensitivity: standard {standard.sensitivity:.5f}, twin {twin.sensitivity:.5f}")

# Optimized over the interrogation time, the twin scheme restores 1/sqrt(N):
print(f"\n{'N':>6}  {'standard optimum':>18}  {'twin optimum':>14}  {'twin * sqrt(N)':>15}")
for n in (4, 16, 64, 256):
    _, s_std = ss.optimize_tau(n, GAMMA_D, "standard")
    _, s_twin = ss.optimize_tau(n, GAMMA_D, "twin-detuning")
    print(f"{n:>6}  {s_std:>18.6f}  {s_twin:>14.6f}  {s_twin * np.sqrt(n):>15.6f}")
print("twin * sqrt(N) pins the 0.969 gamma_d constant; the standard scheme saturates.")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not available; skipping plots")
else:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(omegas * TAU, standard.signal, "k-")
    ax1.set(ylabel=r"$\langle S_z\rangle$", title=f"central fringe, N={N}")
    ax2.plot(omegas * TAU, standard.std_dev, "r-", label="standard")
    ax2.plot(omegas * TAU, twin.std_dev, "b-", label="twin beams")
    ax2.set(xlabel=r"$\Omega\tau$", ylabel=r"$\Delta S_z$")
    ax2.legend()
    fig.tight_layout()
    fig.savefig("demos/02_twin_beam_noise_cancellation.png", dpi=150)
    print("\nwrote demos/02_twin_beam_noise_cancellation.png")
