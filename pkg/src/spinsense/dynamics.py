"""Time evolution under collective laser noise.

Pure collective dephasing admits exact element-wise propagators in the Dicke
basis: every density-matrix element just picks up a detuning phase and a
Gaussian damping factor.  Those closed forms are used for all free-evolution
(Ramsey) paths.  Driving and drive-amplitude noise have no element-wise
solution, so an adaptive Runge-Kutta integrator for the full Lindblad
equation backs those cases.

Rate conventions follow the master equation

    drho/dt = i[rho, H] + (gamma_d/2) * D[S_z](rho) + 2*gamma_a * D[S_x](rho),

with D[L](rho) = 2 L rho L^dag - L^dag L rho - rho L^dag L.  Note the
prefactors: collective phase diffusion enters with gamma_d/2 on S_z, drive
amplitude noise with 2*gamma_a on S_x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .basis import CollectiveState, DickeBasis, SplitBasis

SCHEMES = ("standard", "twin-detuning", "phase-conjugate")

_SCHEME_ALIASES = {
    "standard": "standard",
    "twin": "twin-detuning",
    "twin-detuning": "twin-detuning",
    "conjugate": "phase-conjugate",
    "phase-conjugate": "phase-conjugate",
}


def normalize_scheme(scheme: str) -> str:
    try:
        return _SCHEME_ALIASES[scheme.lower()]
    except (KeyError, AttributeError):
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}") from None


@dataclass(frozen=True)
class NoiseModel:
    """White-noise rates: phase diffusion ``gamma_d``, amplitude noise ``gamma_a``."""

    gamma_d: float = 0.0
    gamma_a: float = 0.0

    def __post_init__(self):
        for name in ("gamma_d", "gamma_a"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)


class IntegrationError(RuntimeError):
    """Lindblad integration failed; ``t_reached`` records the achieved time."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t = {t_reached:.6g})")
        self.t_reached = t_reached


# ---------------------------------------------------------------------------
# Exact element-wise dephasing propagators
# ---------------------------------------------------------------------------

def dephasing_factors(basis: DickeBasis, detuning: float, gamma_d: float, tau: float) -> np.ndarray:
    """Element-wise factors exp([i*Omega*(M'-M) - gamma_d*(M'-M)^2/2] * tau)."""
    m = basis.projections()
    diff = m[None, :] - m[:, None]
    return np.exp((1j * detuning * diff - 0.5 * gamma_d * diff**2) * tau)


def split_dephasing_factors(
    basis: SplitBasis, detuning_1: float, detuning_2: float, gamma_d: float, tau: float
) -> np.ndarray:
    """Two-detuning factors with collective damping exponent (dm1 + dm2)^2."""
    m1, m2 = basis.projection_pair()
    d1 = m1[None, :] - m1[:, None]
    d2 = m2[None, :] - m2[:, None]
    return np.exp((1j * (detuning_1 * d1 + detuning_2 * d2) - 0.5 * gamma_d * (d1 + d2) ** 2) * tau)


def conjugate_dephasing_factors(
    basis: SplitBasis, detuning: float, gamma_d: float, tau: float
) -> np.ndarray:
    """Phase-conjugate factors: collective phases, damping exponent (dm1 - dm2)^2.

    The free Hamiltonian stays the collective Omega*(S_z1 + S_z2); flipping
    the noise sign on one half turns the dissipator into S_z1 - S_z2.
    """
    m1, m2 = basis.projection_pair()
    d1 = m1[None, :] - m1[:, None]
    d2 = m2[None, :] - m2[:, None]
    return np.exp((1j * detuning * (d1 + d2) - 0.5 * gamma_d * (d1 - d2) ** 2) * tau)


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if tau < 0 or not np.isfinite(tau):
        raise ValueError(f"tau must be finite and >= 0, got {tau}")
    return tau


def dephasing_propagate(
    state: CollectiveState, detuning: float, gamma_d: float, tau: float
) -> CollectiveState:
    """Exact free evolution of a single-ensemble state under phase noise."""
    if state.is_split:
        raise ValueError("dephasing_propagate takes a single-ensemble state; use split_dephasing_propagate")
    tau = _check_tau(tau)
    factors = dephasing_factors(state.basis, detuning, gamma_d, tau)
    return CollectiveState(state.basis, state.matrix * factors, check=False)


def split_dephasing_propagate(
    state: CollectiveState, detuning_1: float, detuning_2: float, gamma_d: float, tau: float
) -> CollectiveState:
    """Exact free evolution of a split state with per-half detunings.

    ``detuning_1 == detuning_2`` reproduces the collective standard case;
    ``detuning_1 == -detuning_2`` is the twin-detuning scheme.
    """
    if not state.is_split:
        raise ValueError("split_dephasing_propagate needs a split-basis state")
    tau = _check_tau(tau)
    factors = split_dephasing_factors(state.basis, detuning_1, detuning_2, gamma_d, tau)
    return CollectiveState(state.basis, state.matrix * factors, check=False)


def conjugate_dephasing_propagate(
    state: CollectiveState, detuning: float, gamma_d: float, tau: float
) -> CollectiveState:
    """Exact free evolution with the phase-conjugate dissipator S_z1 - S_z2."""
    if not state.is_split:
        raise ValueError("conjugate_dephasing_propagate needs a split-basis state")
    tau = _check_tau(tau)
    factors = conjugate_dephasing_factors(state.basis, detuning, gamma_d, tau)
    return CollectiveState(state.basis, state.matrix * factors, check=False)


# ---------------------------------------------------------------------------
# General Lindblad right-hand side and adaptive integrator
# ---------------------------------------------------------------------------

Jumps = Sequence[tuple[float, np.ndarray]]


def lindblad_rhs(rho: np.ndarray, hamiltonian: np.ndarray, jumps: Jumps) -> np.ndarray:
    """i[rho, H] + sum_k rate_k (2 L rho L^dag - L^dag L rho - rho L^dag L).

    ``jumps`` carries explicit (rate, operator) pairs; pass gamma_d/2 with
    S_z and 2*gamma_a with S_x for the laser-noise dissipators.
    """
    rho = np.asarray(rho, dtype=complex)
    h = np.asarray(hamiltonian, dtype=complex)
    if rho.shape != h.shape or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"shape mismatch: rho {rho.shape}, H {h.shape}")
    out = 1j * (rho @ h - h @ rho)
    for rate, op in jumps:
        rate = float(rate)
        if rate < 0:
            raise ValueError(f"jump rates must be >= 0, got {rate}")
        if rate == 0.0:
            continue
        op = np.asarray(op, dtype=complex)
        if op.shape != rho.shape:
            raise ValueError(f"jump operator shape {op.shape} does not match state {rho.shape}")
        opd = op.conj().T
        opdop = opd @ op
        out += rate * (2.0 * (op @ rho @ opd) - opdop @ rho - rho @ opdop)
    return out


def integrate_lindblad(
    rho0: np.ndarray,
    hamiltonian: np.ndarray,
    jumps: Jumps,
    tau: float,
    tol: float = 1e-10,
) -> np.ndarray:
    """Adaptive RK45 integration of the Lindblad equation on a raw matrix.

    Returns the re-Hermitized, trace-renormalized density matrix; raises
    IntegrationError if the solver fails or either correction exceeds
    10 * tol.
    """
    tau = _check_tau(tau)
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    rho0 = np.asarray(rho0, dtype=complex)
    if tau == 0.0:
        return rho0.copy()
    h = np.asarray(hamiltonian, dtype=complex)
    pre = []
    for rate, op in jumps:
        rate = float(rate)
        if rate < 0:
            raise ValueError(f"jump rates must be >= 0, got {rate}")
        if rate == 0.0:
            continue
        op = np.asarray(op, dtype=complex)
        if op.shape != rho0.shape:
            raise ValueError(f"jump operator shape {op.shape} does not match state {rho0.shape}")
        opd = op.conj().T
        pre.append((rate, op, opd, opd @ op))
    d = rho0.shape[0]

    def rhs(_t, y):
        r = y.reshape(d, d)
        out = 1j * (r @ h - h @ r)
        for rate, op, opd, opdop in pre:
            out += rate * (2.0 * (op @ r @ opd) - opdop @ r - r @ opdop)
        return out.ravel()

    sol = solve_ivp(
        rhs,
        (0.0, tau),
        rho0.ravel(),
        method="RK45",
        rtol=tol,
        atol=tol,
        first_step=tau / 1000.0,
    )
    if not sol.success:
        raise IntegrationError(f"RK45 failed: {sol.message}", t_reached=float(sol.t[-1]))
    rho = sol.y[:, -1].reshape(d, d)
    herm_corr = 0.5 * float(np.max(np.abs(rho - rho.conj().T)))
    rho = 0.5 * (rho + rho.conj().T)
    trace_corr = abs(float(np.real(np.trace(rho))) - 1.0)
    bound = 10.0 * tol
    if herm_corr > bound or trace_corr > bound:
        raise IntegrationError(
            f"corrections exceed bound {bound:.1e}: hermiticity {herm_corr:.3e}, trace {trace_corr:.3e}",
            t_reached=tau,
        )
    rho /= np.real(np.trace(rho))
    return rho


def evolve(
    state: CollectiveState,
    hamiltonian: np.ndarray,
    jumps: Jumps,
    tau: float,
    tol: float = 1e-10,
) -> CollectiveState:
    """Numeric Lindblad evolution of a collective state (see integrate_lindblad)."""
    rho = integrate_lindblad(state.matrix, hamiltonian, jumps, tau, tol)
    return CollectiveState(state.basis, rho, check=False)
